#include <doctest.h>

#include "sdqw/evolution.hpp"
#include "sdqw/geometry.hpp"
#include "sdqw/hamiltonian.hpp"
#include "../support/fields.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sdqw;
using std::numbers::pi;
using testing_support::constant_restricted;

namespace {

MetricSpec rindler_metric(double a, double mass) {
  MetricSpec s = flat_metric(mass);
  s.e11 = [a](double x, double) { return x + 5 * a; };
  s.ratio_dx = [](double, double) { return 1.0; };
  return s;
}

MetricSpec trig_metric(double mass) {
  MetricSpec s = flat_metric(mass);
  s.e00 = [](double, double t) { return 1.0 / t; };
  s.e11 = [](double x, double t) { return std::cos(pi / 4 + 4 * x) / t; };
  s.ratio_dx = [](double x, double) { return -4 * std::sin(pi / 4 + 4 * x); };
  return s;
}

void check_round_trip(const MetricSpec& spec, const Lattice& lat, double t) {
  const std::vector<double> times{t};
  const auto coins = metric_to_coin(spec, lat, {}, times);
  const auto back = coin_to_metric(coins.coin1, coins.coin2, spec.e00, lat, times).spec;
  for (int j = 0; j < lat.n_sites(); ++j) {
    const double x = lat.position(j);
    CHECK(std::abs(back.ratio(x, t) - spec.ratio(x, t)) < 1e-8);
    CHECK(std::abs(back.A0(x, t) - spec.A0(x, t)) < 1e-8);
    CHECK(std::abs(back.mass(x, t) - spec.mass(x, t)) < 1e-8);
  }
}

}  // namespace

TEST_CASE("flat metric maps to the static-flat coin set") {
  const double a = 1.0 / 250;
  const Lattice lat = make_lattice(400, a);
  const auto c = metric_to_coin(flat_metric(0.04), lat);
  for (double x : {-0.5, 0.0, 0.3}) {
    CHECK(c.coin1.theta(x, 0) == 0.0);
    CHECK(c.coin2.theta(x, 0) == 0.0);
    CHECK(c.coin1.vartheta(x, 0) == 0.0);
    CHECK(c.coin2.vartheta(x, 0) == doctest::Approx(0.04));
    CHECK(c.coin1.xi(x, 0) == 0.0);
    CHECK(c.coin2.xi(x, 0) == 0.0);
  }
  // theta2(x, t, tau) = 0.04 / L at tau = a
  CHECK(c.coin2.theta(0, 0) + a * c.coin2.vartheta(0, 0) == doctest::Approx(0.04 / 250));
}

TEST_CASE("linear e11 maps to the curved coin set") {
  const double a = 1.0 / 250;
  const Lattice lat = make_lattice(200, a);
  const auto c = metric_to_coin(rindler_metric(a, 0.04), lat);
  for (int j = 0; j < 200; j += 7) {
    const double x = lat.position(j), u = x + 5 * a;
    CHECK(c.coin1.theta(x, 0) == doctest::Approx(0.5 * std::acos(u)));
    CHECK(c.coin2.theta(x, 0) == doctest::Approx(-std::acos(u)));
    CHECK(c.coin1.vartheta(x, 0) == doctest::Approx(0.5 / std::sqrt(1 - u * u)));
    CHECK(c.coin2.vartheta(x, 0) == doctest::Approx(0.04));
  }
  CHECK(c.coin1.theta(0, 0) == doctest::Approx(0.5 * std::acos(0.02)));
}

TEST_CASE("gauge fields enter through the first coin phase") {
  const double a = 1.0 / 250;
  const Lattice lat = make_lattice(200, a);
  // Coin-level gauge set: xi1 = 1000 x t, lambda1 = 0.03 x.
  const auto base = metric_to_coin(rindler_metric(a, 0.04), lat);
  RestrictedCoinField c1 = base.coin1;
  c1.xi = [](double x, double t) { return 1000 * x * t; };
  c1.dxi = [](double, double t) { return 1000 * t; };
  c1.lambda = [](double x, double) { return 0.03 * x; };
  const std::vector<double> times{0.5};
  const auto m = coin_to_metric(c1, base.coin2, [](double, double) { return 1.0; }, lat, times);
  // cos(2 theta1) = x + 5a vanishes at x = -5a.
  REQUIRE(m.a1_singular_sites.size() == 1);
  CHECK(lat.position(m.a1_singular_sites[0]) == doctest::Approx(-5 * a));
  for (int j = 0; j < 200; j += 11) {
    const double x = lat.position(j);
    CHECK(m.spec.A0(x, 0.5) == doctest::Approx(0.03 * x));
    CHECK(m.spec.A1(x, 0.5) == doctest::Approx(-500.0 / (x + 5 * a)));
  }
  // And back: dxi1/dx is recovered away from the singular site; integrating across it fails.
  const auto again = metric_to_coin(m.spec, lat, {}, times);
  for (int j = 0; j < 200; j += 11) {
    if (j == m.a1_singular_sites[0]) continue;
    const double x = lat.position(j);
    CHECK(again.coin1.dxi(x, 0.5) == doctest::Approx(500.0));
    CHECK(again.coin1.lambda(x, 0.5) == doctest::Approx(0.03 * x));
  }
  CHECK_THROWS_AS(again.coin1.xi(0.1, 0.5), DomainError);
}

TEST_CASE("phase reconstruction integrates from the leftmost site") {
  const double a = 1.0 / 100;
  const Lattice lat = make_lattice(64, a);
  MetricSpec s = flat_metric(0.0);
  s.A1 = [](double, double t) { return -2.0 * t; };  // dxi1/dx = 2t
  const auto c = metric_to_coin(s, lat);
  for (int j = 0; j < 64; j += 5) {
    const double x = lat.position(j);
    CHECK(c.coin1.xi(x, 0.5) == doctest::Approx(x - lat.position(0)).epsilon(1e-12));
  }
  CHECK(c.coin1.xi(lat.position(0), 0.5) == 0.0);
}

TEST_CASE("ratio outside [-1, 1] is a domain error naming the site") {
  MetricSpec s = flat_metric(0.0);
  s.e11 = [](double x, double) { return 1.0 + x; };
  const Lattice lat = make_lattice(10, 0.1);  // x from -0.5 to 0.4
  try {
    metric_to_coin(s, lat);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.site() == 6);
  }
}

TEST_CASE("coin to metric: flat, curved and non-static sets") {
  const double a = 1.0 / 250;
  const Lattice lat = make_lattice(200, a);
  const ScalarField unit = [](double, double) { return 1.0; };
  const auto flat = coin_to_metric(constant_restricted(0, 0, 1), constant_restricted(0, 0.04, 2), unit, lat).spec;
  CHECK(flat.ratio(0.1, 0) == 1.0);
  CHECK(flat.mass(0.1, 0) == doctest::Approx(0.04));
  CHECK(flat.A0(0.1, 0) == 0.0);
  CHECK(flat.A1(0.1, 0) == 0.0);

  const auto curved = metric_to_coin(rindler_metric(a, 0.04), lat);
  const auto m4 = coin_to_metric(curved.coin1, curved.coin2, unit, lat).spec;
  for (double x : {-0.2, 0.0, 0.3}) {
    const double g11 = -m4.e11(x, 0) * m4.e11(x, 0);
    CHECK(g11 == doctest::Approx(-(x + 5 * a) * (x + 5 * a)));
  }

  // theta1 = pi/8 + 2x with e00 = 1/t.
  RestrictedCoinField t1 = constant_restricted(0, 0, 1);
  t1.theta = [](double x, double) { return pi / 8 + 2 * x; };
  t1.dtheta = [](double, double) { return 2.0; };
  t1.vartheta = [](double, double) { return -2.0; };
  RestrictedCoinField t2 = constant_restricted(0, 0, 2);
  t2.theta = [](double x, double) { return -pi / 4 - 4 * x; };
  t2.dtheta = [](double, double) { return -4.0; };
  t2.vartheta = [](double, double t) { return 0.04 * t; };
  const Lattice l2 = make_lattice(400, 1.0 / 150);
  const std::vector<double> times{0.7};
  const auto rec = coin_to_metric(t1, t2, [](double, double t) { return 1.0 / t; }, l2, times);
  for (double x : {-0.9, -0.1, 0.25, 1.1}) {
    const double t = 0.7;
    const double g11 = -rec.spec.e11(x, t) * rec.spec.e11(x, t);
    const double d = std::cos(4 * x) - std::sin(4 * x);
    CHECK(g11 == doctest::Approx(-0.5 * d * d / (t * t)));
    CHECK(rec.spec.mass(x, t) == doctest::Approx(0.04));
  }
}

TEST_CASE("coin to metric rejects coins outside the comparable family") {
  const Lattice lat = make_lattice(16, 0.05);
  CHECK_THROWS_AS(coin_to_metric(constant_restricted(0.2, 0, 1), constant_restricted(0.1, 0, 2),
                                 [](double, double) { return 1.0; }, lat),
                  ValidationError);
}

TEST_CASE("A1 singular sites are reported") {
  const Lattice lat = make_lattice(8, 1.0);
  RestrictedCoinField c1 = constant_restricted(pi / 4, 0, 1);
  c1.xi = [](double x, double) { return x; };
  c1.dxi = [](double, double) { return 1.0; };
  const auto rec = coin_to_metric(c1, constant_restricted(-pi / 2, 0, 2), [](double, double) { return 1.0; }, lat);
  CHECK(rec.a1_singular_sites.size() == 8);
  CHECK_THROWS_AS(rec.spec.A1(0.0, 0.0), DomainError);
}

TEST_CASE("round trip on the three scenario metrics") {
  check_round_trip(flat_metric(0.04), make_lattice(400, 1.0 / 250), 0.0);
  check_round_trip(rindler_metric(1.0 / 250, 0.04), make_lattice(200, 1.0 / 250), 0.0);
  for (double t : {0.3, 1.0}) check_round_trip(trig_metric(0.04), make_lattice(400, 1.0 / 150), t);

  MetricSpec gauged = rindler_metric(1.0 / 100, 0.1);
  gauged.A0 = [](double x, double t) { return 0.3 * x + t; };
  gauged.A1 = [](double x, double) { return std::sin(x); };
  gauged.mass = [](double x, double) { return 0.1 + 0.05 * x * x; };
  check_round_trip(gauged, make_lattice(64, 1.0 / 100), 0.2);
}

TEST_CASE("alternative splits keep the physical sums") {
  const double a = 1.0 / 100;
  const Lattice lat = make_lattice(64, a);
  MappingOptions opt;
  opt.mass_split = MassSplit::AllOnCoin2;
  opt.potential_split = PotentialSplit::Coin2;
  MetricSpec s = rindler_metric(a, 0.04);
  s.A0 = [](double x, double) { return 0.2 * x; };
  const auto c = metric_to_coin(s, lat, opt);
  const auto back = coin_to_metric(c.coin1, c.coin2, s.e00, lat).spec;
  CHECK(c.coin1.vartheta(0.1, 0) == 0.0);
  CHECK(c.coin1.lambda(0.1, 0) == 0.0);
  CHECK(back.mass(0.1, 0) == doctest::Approx(0.04));
  CHECK(back.A0(0.1, 0) == doctest::Approx(0.02));
}

TEST_CASE("flat Dirac Hamiltonian and a constant potential") {
  const Lattice lat = make_lattice(10, 0.1);
  const CMatrix H = dirac_hamiltonian_1p1(flat_metric(0.04), lat, 0.0);
  const CMatrix P = MomentumOperator(lat).matrix();
  CHECK(max_abs(H.topLeftCorner(10, 10) - P) < 1e-14);
  CHECK(max_abs(H.bottomRightCorner(10, 10) + P) < 1e-14);
  CHECK(max_abs(H.topRightCorner(10, 10) - 0.04 * CMatrix::Identity(10, 10)) < 1e-15);
  CHECK(max_abs(H - H.adjoint()) < 1e-12);

  MetricSpec shifted = flat_metric(0.04);
  shifted.A0 = [](double, double) { return 0.7; };
  const CMatrix Hs = dirac_hamiltonian_1p1(shifted, lat, 0.0);
  CHECK(max_abs(Hs - H + 0.7 * CMatrix::Identity(20, 20)) < 1e-14);
}

TEST_CASE("curved Dirac Hamiltonian matches the coin-derived Hamiltonian") {
  for (double L : {100.0, 250.0}) {
    const double a = 1.0 / L;
    const Lattice lat = make_lattice(window_sites(L, 0.3), a);
    MetricSpec s = rindler_metric(a, 0.04);
    s.A0 = [](double x, double) { return 0.03 * x; };
    const auto coins = metric_to_coin(s, lat);
    const auto h = coefficients_restricted(coins.coin1, coins.coin2, 0.0, lat);
    const CMatrix Hc = assemble(h, lat);
    const CMatrix Hd = dirac_hamiltonian_1p1(s, lat, 0.0);
    CHECK(max_abs(Hd - Hd.adjoint()) < 1e-12);
    for (const auto& psi : smooth_test_bank(lat)) CHECK(((Hc - Hd) * psi).norm() < 1e-10);
  }
}

TEST_CASE("dispersion special values") {
  const double tau = 0.01, a = 0.01;
  for (double k : {0.0, 1.0, 50.0, 300.0}) CHECK(dispersion(k, 0, 0, tau, a) == doctest::Approx(k).epsilon(1e-12));
  CHECK(dispersion(0.0, 0.3, 0.5, tau, a) == doctest::Approx(0.8 / tau));
  for (double k : {0.0, 20.0, 314.0}) CHECK(dispersion(k, pi / 2, pi / 2, tau, a) == doctest::Approx(pi / tau));
  CHECK(dispersion(-7.0, 0.2, 0.4, tau, a) == dispersion(7.0, 0.2, 0.4, tau, a));
}

TEST_CASE("dispersion equals the eigenphases of the homogeneous step") {
  const int n = 64;
  const double a = 1.0, tau = 1.0;
  const Lattice lat = make_lattice(n, a);
  std::mt19937_64 rng(90);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int trial = 0; trial < 5; ++trial) {
    const double t1 = u(rng), t2 = u(rng);
    StepBuilder b{constant_restricted(t1, 0, 1), constant_restricted(t2, 0, 2), lat, StepMode::Conventional};
    const CMatrix U = conventional_step(b, 0, 0).matrix;
    for (double k : momentum_values(lat).values) {
      CMatrix w = CMatrix::Zero(2 * n, 2);
      for (int j = 0; j < n; ++j) {
        const Complex e = std::polar(1.0 / std::sqrt(double(n)), k * lat.position(j));
        w(j, 0) = e;
        w(n + j, 1) = e;
      }
      const Eigen::Matrix2cd block = w.adjoint() * U * w;
      Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(block);
      const double e_pred = dispersion(k, t1, t2, tau, a);
      for (int q = 0; q < 2; ++q) {
        const double phase = std::abs(std::arg(es.eigenvalues()[q]));
        CHECK(std::abs(phase - e_pred * tau) < 1e-10);
      }
    }
  }
}

TEST_CASE("light cones") {
  const double a = 1.0 / 250;
  const auto flat = light_cone_boundary(0.1, 0.5, flat_metric(0));
  CHECK(flat.left == doctest::Approx(-0.4).epsilon(1e-10));
  CHECK(flat.right == doctest::Approx(0.6).epsilon(1e-10));
  const auto zero = light_cone_boundary(0.2, 0.0, rindler_metric(a, 0));
  CHECK(zero.left == 0.2);
  CHECK(zero.right == 0.2);
  for (double t : {0.1, 1.0, 3.2}) {
    const auto num = light_cone_boundary(0.0, t, rindler_metric(a, 0));
    const auto exact = linear_light_cone(0.0, t, 5 * a);
    CHECK(std::abs(num.left - exact.left) < 1e-8);
    CHECK(std::abs(num.right - exact.right) < 1e-8);
    CHECK(std::log(exact.right + 5 * a) - std::log(5 * a) == doctest::Approx(t));
    // Inside the Minkowski cone.
    CHECK(exact.right <= t);
    CHECK(exact.left >= -t);
  }
}

TEST_CASE("embedding in 2+1 dimensions") {
  const Lattice lat = make_lattice(16, 0.05);
  const auto e0 = embed_2p1(constant_restricted(0, 0, 1), constant_restricted(0, 0, 2), 0.3, lat, 0.0);
  for (int j = 0; j < 16; ++j) {
    const auto k = static_cast<std::size_t>(j);
    CHECK(e0.e1_1[k] == 1.0);
    CHECK(e0.e1_2[k] == 0.0);
    CHECK(e0.e2_1[k] == 0.5);
    CHECK(e0.e2_2[k] == 0.0);
    CHECK(e0.e2_0[k] == 0.5);
    CHECK(e0.A2[k] == doctest::Approx(0.3));
  }
  std::mt19937_64 rng(91);
  const auto f1 = testing_support::random_restricted(rng, 1), f2 = testing_support::random_restricted(rng, 2);
  const auto e = embed_2p1(f1, f2, 0.0, lat, 0.1);
  for (int j = 0; j < 16; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Eigen::Matrix3d& g = e.metric[k];
    const double c2 = std::pow(std::cos(f2.theta(lat.position(j), 0.1)), 2);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(g(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(g(0, 1)) < 1e-12);
    CHECK(std::abs(g(0, 2) - 0.5) < 1e-12);
    CHECK(std::abs(g(1, 2) + 0.5 * c2) < 1e-12);
    CHECK(std::abs(g(2, 2)) < 1e-12);
    // From the vielbein definition; see the ledger for the displayed entry.
    CHECK(std::abs(g(1, 1) + c2) < 1e-12);
    CHECK(e.A1[k] == doctest::Approx(-f1.dxi(lat.position(j), 0.1)));
  }
}

TEST_CASE("monotonicity diagnostic") {
  const auto a = monotonicity_check(0.1, 0.1, 0.01, 0.01);
  CHECK(a.applicable);
  CHECK(a.monotone);
  const auto b = monotonicity_check(0.0, 0.0, 0.01, 0.01);
  CHECK(b.monotone);
  const auto c = monotonicity_check(pi / 2, 0.2, 0.01, 0.01);
  CHECK_FALSE(c.applicable);
  CHECK(c.message.find("not applicable") != std::string::npos);
}
