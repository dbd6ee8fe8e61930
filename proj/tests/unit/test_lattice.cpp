#include <doctest.h>

#include "sdqw/lattice.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sdqw;
using std::numbers::pi;

TEST_CASE("make_lattice places the origin at floor(n/2)") {
  const Lattice lat = make_lattice(4, 1.0);
  CHECK(lat.origin_index() == 2);
  const auto xs = lat.positions();
  REQUIRE(xs.size() == 4);
  CHECK(xs[0] == -2.0);
  CHECK(xs[1] == -1.0);
  CHECK(xs[2] == 0.0);
  CHECK(xs[3] == 1.0);
}

TEST_CASE("static scenario lattice spans [-0.8, 0.796]") {
  const Lattice lat = make_lattice(400, 1.0 / 250);
  CHECK(lat.position(0) == doctest::Approx(-0.8).epsilon(1e-14));
  CHECK(lat.position(399) == doctest::Approx(0.796).epsilon(1e-14));
  for (int j = 1; j < 400; ++j) CHECK(lat.position(j) > lat.position(j - 1));
}

TEST_CASE("lattice validation") {
  CHECK_THROWS_AS(make_lattice(1, 1.0), ValidationError);
  CHECK_THROWS_AS(make_lattice(4, 0.0), ValidationError);
  CHECK_THROWS_AS(make_lattice(4, -1.0), ValidationError);
  CHECK(make_lattice(5, 1.0).wrap(5) == 0);
  CHECK(make_lattice(5, 1.0).wrap(-1) == 4);
}

TEST_CASE("momentum grid, even and odd sizes") {
  const auto even = momentum_values(make_lattice(4, 1.0)).values;
  REQUIRE(even.size() == 4);
  CHECK(even[0] == doctest::Approx(-pi / 2));
  CHECK(even[1] == doctest::Approx(0.0));
  CHECK(even[2] == doctest::Approx(pi / 2));
  CHECK(even[3] == doctest::Approx(pi));

  const auto odd = momentum_values(make_lattice(3, 1.0)).values;
  REQUIRE(odd.size() == 3);
  CHECK(odd[0] == doctest::Approx(-2 * pi / 3));
  CHECK(odd[1] == doctest::Approx(0.0));
  CHECK(odd[2] == doctest::Approx(2 * pi / 3));
}

TEST_CASE("momentum grid lies in the first Brillouin zone, equally spaced") {
  for (int n : {2, 3, 7, 16, 33, 400}) {
    for (double a : {1.0, 0.25, 1.0 / 150}) {
      const auto g = momentum_values(make_lattice(n, a));
      const double top = pi / a;
      for (double k : g.values) {
        CHECK(k > -top * (1 + 1e-14));
        CHECK(k <= top * (1 + 1e-14));
      }
      for (std::size_t i = 1; i < g.values.size(); ++i)
        CHECK(g.values[i] - g.values[i - 1] == doctest::Approx(2 * pi / (n * a)).epsilon(1e-12));
      CHECK(g.values.back() - g.values.front() + g.step == doctest::Approx(2 * pi / a).epsilon(1e-12));
    }
  }
}

TEST_CASE("initial states") {
  const Lattice lat = make_lattice(8, 0.5);
  const std::vector<Complex> paper{1 / std::sqrt(2.0), Complex(0, 1 / std::sqrt(2.0))};
  const auto s = initial_state(paper, lat.origin_index(), lat);
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.amplitude(1, lat.origin_index()) == Complex(0, 1 / std::sqrt(2.0)));

  const std::vector<Complex> up{1.0, 0.0};
  const auto b = initial_state(up, lat.origin_index(), lat);
  CHECK(b.amplitude(0, lat.origin_index()) == Complex(1.0));
  CHECK(b.norm_squared() == 1.0);

  const std::vector<Complex> mixed{0.6, 0.8};
  const auto m = initial_state(mixed, lat.nearest_site(0.5), lat);
  const auto p = probability_profile(m);
  CHECK(p[static_cast<std::size_t>(lat.origin_index() + 1)] == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<Complex> bad{1.0, 1.0};
  CHECK_THROWS_AS(initial_state(bad, 0, lat), ValidationError);
  CHECK_THROWS_AS(initial_state(up, 8, lat), ValidationError);
}

TEST_CASE("probability profile") {
  const Lattice lat = make_lattice(2, 1.0);
  CVector amp(4);
  amp << std::sqrt(0.5), 0.0, 0.0, std::sqrt(0.5);
  const auto p = probability_profile(WalkState(lat, 2, amp));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("probability profile is invariant under a global phase") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const Lattice lat = make_lattice(16, 0.1);
  CVector amp(32);
  for (auto& z : amp) z = Complex(nd(rng), nd(rng));
  amp.normalize();
  const auto p = probability_profile(WalkState(lat, 2, amp));
  const auto q = probability_profile(WalkState(lat, 2, CVector(std::polar(1.0, 0.7) * amp)));
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    CHECK(std::abs(p[j] - q[j]) < 1e-15);
    s += p[j];
  }
  CHECK(std::abs(s - 1.0) < 1e-10);
}

TEST_CASE("inverse participation ratio and edge detection") {
  const std::vector<double> point{0.0, 1.0, 0.0};
  const std::vector<double> flat{0.25, 0.25, 0.25, 0.25};
  CHECK(inverse_participation_ratio(point) == 1.0);
  CHECK(inverse_participation_ratio(flat) == doctest::Approx(0.25));
  CHECK_FALSE(touches_boundary(point));
  CHECK(touches_boundary(flat));
}
