#include <doctest.h>

#include "sdqw/operators.hpp"
#include "../support/fields.hpp"

#include <cmath>
#include <random>

using namespace sdqw;
using testing_support::constant_restricted;
using testing_support::random_general;
using testing_support::random_restricted;

TEST_CASE("shift Plus on 4 sites is the cyclic up-block permutation") {
  const Lattice lat = make_lattice(4, 1.0);
  const auto sp = build_shift(lat, ShiftDirection::Plus, 2);
  CMatrix cyc = CMatrix::Zero(4, 4);
  cyc(1, 0) = cyc(2, 1) = cyc(3, 2) = cyc(0, 3) = 1.0;
  CHECK(max_abs(sp.matrix.topLeftCorner(4, 4) - cyc) == 0.0);
  CHECK(max_abs(sp.matrix.bottomRightCorner(4, 4) - CMatrix::Identity(4, 4)) == 0.0);
  CHECK(max_abs(sp.matrix.topRightCorner(4, 4)) == 0.0);
  CHECK(sp.unitarity_defect() == 0.0);
}

TEST_CASE("shift Minus moves the down block by -a") {
  const Lattice lat = make_lattice(6, 1.0);
  const auto sp = build_shift(lat, ShiftDirection::Plus, 2);
  const auto sm = build_shift(lat, ShiftDirection::Minus, 2);
  CVector down = CVector::Zero(12);
  down[6 + 3] = 1.0;
  const CVector out = sp.matrix * (sm.matrix * down);
  CHECK(std::abs(out[6 + 2] - 1.0) == 0.0);
  CHECK(sm.unitarity_defect() == 0.0);
  CHECK_THROWS_AS(build_shift(lat, ShiftDirection::Plus, 3), ValidationError);
}

TEST_CASE("structured shift equals dense shift, including 2N coins") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int coin_dim : {2, 4, 6}) {
    const Lattice lat = make_lattice(7, 0.3);
    CVector v(coin_dim * 7);
    for (auto& z : v) z = Complex(nd(rng), nd(rng));
    for (auto dir : {ShiftDirection::Plus, ShiftDirection::Minus}) {
      CVector w = v;
      apply_shift(dir, coin_dim, 7, w);
      CHECK(max_abs(w - build_shift(lat, dir, coin_dim).matrix * v) < 1e-15);
    }
  }
}

TEST_CASE("trivial coin is the identity") {
  const Lattice lat = make_lattice(5, 0.2);
  const auto c = build_coin_restricted(constant_restricted(0.0, 0.0), 0.0, 0.0, lat);
  CHECK(max_abs(c.matrix - CMatrix::Identity(10, 10)) == 0.0);
}

TEST_CASE("flat scenario second coin rotates by 0.04 tau") {
  const Lattice lat = make_lattice(4, 1.0 / 250);
  const auto c = build_coin_restricted(constant_restricted(0.0, 0.04, 2), 0.0, 1.0 / 250, lat);
  const double th = 0.04 / 250;
  CHECK(std::abs(c.matrix(0, 0) - std::cos(th)) < 1e-15);
  CHECK(std::abs(c.matrix(0, 4) - Complex(0, -std::sin(th))) < 1e-15);
  CHECK(std::abs(c.matrix(4, 0) - Complex(0, -std::sin(th))) < 1e-15);
}

TEST_CASE("restricted coin at tau = 0 is exp(-i theta sigma_1)") {
  std::mt19937_64 rng(11);
  const Lattice lat = make_lattice(9, 0.1);
  const auto f = random_restricted(rng);
  const auto c = build_coin_restricted(f, 0.3, 0.0, lat);
  for (int j = 0; j < 9; ++j) {
    const double x = lat.position(j);
    const double th = f.theta(x, 0.3);
    const Complex ph = std::polar(1.0, f.xi(x, 0.3));
    const Eigen::Matrix2cd expected =
        ph * (std::cos(th) * pauli(0) - Complex(0, std::sin(th)) * pauli(1));
    for (int r = 0; r < 2; ++r)
      for (int q = 0; q < 2; ++q) CHECK(std::abs(c.matrix(r * 9 + j, q * 9 + j) - expected(r, q)) < 1e-15);
  }
}

TEST_CASE("pi/2 rotation gives -i sigma_1") {
  const Lattice lat = make_lattice(3, 1.0);
  const auto c = build_coin_restricted(constant_restricted(M_PI / 2, 0.0), 0.0, 0.0, lat);
  CHECK(std::abs(c.matrix(0, 3) - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(c.matrix(0, 0)) < 1e-15);
}

TEST_CASE("same-axis rotations compose additively") {
  const Lattice lat = make_lattice(4, 1.0);
  const auto a = build_coin_restricted(constant_restricted(0.3, 0.0), 0.0, 0.0, lat);
  const auto b = build_coin_restricted(constant_restricted(-1.1, 0.0), 0.0, 0.0, lat);
  const auto ab = build_coin_restricted(constant_restricted(-0.8, 0.0), 0.0, 0.0, lat);
  CHECK(max_abs(a.matrix * b.matrix - ab.matrix) < 1e-15);
}

TEST_CASE("induced general coin matches the restricted coin at tau = 0") {
  std::mt19937_64 rng(5);
  const Lattice lat = make_lattice(16, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_restricted(rng);
    const auto r = build_coin_restricted(f, 0.2, 0.0, lat);
    const auto g = build_coin(f.to_coin_field(), 0.2, 0.0, lat);
    CHECK(max_abs(r.matrix - g.matrix) < 1e-14);
  }
}

TEST_CASE("built coins are unitary; the tau^2 term is not a defect") {
  std::mt19937_64 rng(9);
  const Lattice lat = make_lattice(128, 1.0 / 100);
  for (int trial = 0; trial < 3; ++trial) {
    const auto g = build_coin(random_general(rng), 0.1, 0.01, lat);
    CHECK(g.unitarity_defect() < 1e-12);
    CHECK(g.pre_projection_defect > 0.0);
    const auto r = build_coin_restricted(random_restricted(rng), 0.1, 0.01, lat);
    CHECK(r.unitarity_defect() < 1e-12);
  }
}

TEST_CASE("inconsistent general field is rejected") {
  CoinField bad;
  bad.F = [](double, double) { return Complex(0.9, 0.0); };
  bad.G = [](double, double) { return Complex(0.0, 0.0); };
  bad.f = [](double, double) { return Complex(0.0, 0.0); };
  bad.g = [](double, double) { return Complex(0.0, 0.0); };
  bad.xi = [](double, double) { return 0.0; };
  bad.lambda = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(build_coin(bad, 0.0, 0.0, make_lattice(4, 1.0)), ValidationError);
}

TEST_CASE("out-of-domain angle surfaces as a domain error with the site") {
  RestrictedCoinField f = constant_restricted(0.0, 0.0);
  f.theta = [](double x, double) { return 0.5 * std::acos(x); };
  const Lattice lat = make_lattice(8, 0.5);  // x from -2 to 1.5
  try {
    build_coin_restricted(f, 0.0, 0.0, lat);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.site() == 0);
  }
}

TEST_CASE("site-wise coin application matches the dense coin") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  const Lattice lat = make_lattice(12, 0.1);
  const CoinSource f = random_general(rng);
  const auto blocks = sample_coins(f, lat, 0.3, 0.1);
  const CMatrix dense = build_coin(f, 0.3, 0.1, lat).matrix;
  CVector v(24);
  for (auto& z : v) z = Complex(nd(rng), nd(rng));
  CVector w = v;
  apply_site_coins(blocks, w);
  CHECK(max_abs(w - dense * v) < 1e-14);
  w = v;
  apply_site_coins_adjoint(blocks, w);
  CHECK(max_abs(w - dense.adjoint() * v) < 1e-14);
}

TEST_CASE("derivative sampling: analytic, fallback, disabled") {
  const Lattice lat = make_lattice(64, 0.01);
  const ScalarField f = [](double x, double) { return std::sin(3 * x); };
  const ScalarField df = [](double x, double) { return 3 * std::cos(3 * x); };
  const auto a = sample_derivative(f, df, lat, 0.0, DerivativePolicy::AnalyticOnly, "f");
  CHECK_FALSE(a.used_fallback);
  const auto b = sample_derivative(f, ScalarField{}, lat, 0.0, DerivativePolicy::AllowFallback, "f");
  CHECK(b.used_fallback);
  // Interior sites agree to second order in a.
  for (int j = 1; j < 63; ++j) CHECK(std::abs(a.values[static_cast<std::size_t>(j)] - b.values[static_cast<std::size_t>(j)]) < 1e-3);
  CHECK_THROWS_AS(sample_derivative(f, ScalarField{}, lat, 0.0, DerivativePolicy::AnalyticOnly, "f"),
                  ValidationError);
}
