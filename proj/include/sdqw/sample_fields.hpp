#pragma once

#include "sdqw/gauge_un.hpp"
#include "sdqw/operators.hpp"
#include "sdqw/two_particle.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

// Smooth closed-form fields used by the verification suite and the tests.
namespace sdqw::samples {

// Smooth random restricted field: a sum of a few low-frequency harmonics.
inline RestrictedCoinField random_restricted(std::mt19937_64& rng, int label = 1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a0 = u(rng), a1 = 0.6 * u(rng), k1 = 2.0 + 2.0 * u(rng), p1 = 3.0 * u(rng);
  const double bt = 0.5 * u(rng);
  const double v0 = u(rng), v1 = 0.5 * u(rng), kv = 1.5 * u(rng);
  const double s0 = 0.7 * u(rng), ks = 1.0 + u(rng), l0 = 0.4 * u(rng), l1 = 0.3 * u(rng);
  RestrictedCoinField f;
  f.theta = [=](double x, double t) { return a0 + a1 * std::sin(k1 * x + p1) + bt * t; };
  f.dtheta = [=](double x, double) { return a1 * k1 * std::cos(k1 * x + p1); };
  f.vartheta = [=](double x, double) { return v0 + v1 * std::cos(kv * x); };
  f.xi = [=](double x, double t) { return s0 * std::sin(ks * x) + 0.1 * t; };
  f.dxi = [=](double x, double) { return s0 * ks * std::cos(ks * x); };
  f.lambda = [=](double x, double) { return l0 + l1 * x; };
  f.label = label;
  return f;
}

// Smooth random general U(2) field: F = cos(al) e^{i be}, G = sin(al) e^{i ga} with every
// angle linear in tau; f, g and the x-derivatives follow analytically.
inline CoinField random_general(std::mt19937_64& rng, int label = 1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double al0 = u(rng), al1 = 0.5 * u(rng), kal = 2.0 + u(rng);
  const double be0 = u(rng), be1 = 0.4 * u(rng), kbe = 1.0 + u(rng);
  const double ga0 = u(rng), ga1 = 0.4 * u(rng), kga = 3.0 * u(rng);
  const double ra = 0.7 * u(rng), rb = 0.3 * u(rng), rg = 0.5 * u(rng);
  const double s0 = 0.5 * u(rng), ks = 1.0 + u(rng), l0 = 0.3 * u(rng);
  auto al = [=](double x) { return al0 + ra * std::sin(kal * x); };
  auto dal = [=](double x) { return ra * kal * std::cos(kal * x); };
  auto be = [=](double x) { return be0 + rb * x * x * kbe; };
  auto dbe = [=](double x) { return 2.0 * rb * x * kbe; };
  auto ga = [=](double x) { return ga0 + rg * std::sin(kga * x); };
  auto dga = [=](double x) { return rg * kga * std::cos(kga * x); };
  const Complex i{0.0, 1.0};
  CoinField f;
  f.F = [=](double x, double) { return std::cos(al(x)) * std::exp(i * be(x)); };
  f.G = [=](double x, double) { return std::sin(al(x)) * std::exp(i * ga(x)); };
  f.f = [=](double x, double) {
    return (-std::sin(al(x)) * al1 + i * std::cos(al(x)) * be1) * std::exp(i * be(x));
  };
  f.g = [=](double x, double) {
    return (std::cos(al(x)) * al1 + i * std::sin(al(x)) * ga1) * std::exp(i * ga(x));
  };
  f.dF = [=](double x, double) {
    return (-std::sin(al(x)) * dal(x) + i * std::cos(al(x)) * dbe(x)) * std::exp(i * be(x));
  };
  f.dG = [=](double x, double) {
    return (std::cos(al(x)) * dal(x) + i * std::sin(al(x)) * dga(x)) * std::exp(i * ga(x));
  };
  f.xi = [=](double x, double) { return s0 * std::cos(ks * x); };
  f.dxi = [=](double x, double) { return -s0 * ks * std::sin(ks * x); };
  f.lambda = [=](double x, double) { return l0 * x; };
  f.label = label;
  return f;
}

inline RestrictedCoinField constant_restricted(double theta, double vartheta, int label = 1) {
  RestrictedCoinField f;
  f.theta = [=](double, double) { return theta; };
  f.dtheta = [](double, double) { return 0.0; };
  f.vartheta = [=](double, double) { return vartheta; };
  f.xi = [](double, double) { return 0.0; };
  f.dxi = [](double, double) { return 0.0; };
  f.lambda = [](double, double) { return 0.0; };
  f.label = label;
  return f;
}


// Smooth per-generator weights for U(N) potentials.
inline GaugeWeight random_weight(std::mt19937_64& rng, int n_generators) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> amp, k, ph, drift;
  for (int q = 0; q < n_generators; ++q) {
    amp.push_back(u(rng));
    k.push_back(1.0 + 2.0 * u(rng));
    ph.push_back(3.0 * u(rng));
    drift.push_back(0.3 * u(rng));
  }
  return [=](int q, double x, double t) { return amp[q] * std::sin(k[q] * x + ph[q]) + drift[q] * t; };
}

// Smooth two-particle angle with analytic derivatives and a mixed x1 x2 term.
inline TwoCoinField random_pair(std::uint64_t seed, int label) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a0 = u(rng), a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng), c = u(rng);
  const double k1 = 2.0 + u(rng), k2 = 2.0 + u(rng), v0 = u(rng), v1 = u(rng);
  TwoCoinField f;
  f.theta = [=](double x1, double x2, double t) {
    return a0 + a1 * std::sin(k1 * x1 + b1) + a2 * std::cos(k2 * x2 + b2) + c * x1 * x2 + 0.2 * t;
  };
  f.dtheta_dx1 = [=](double x1, double x2, double) { return a1 * k1 * std::cos(k1 * x1 + b1) + c * x2; };
  f.dtheta_dx2 = [=](double x1, double x2, double) { return -a2 * k2 * std::sin(k2 * x2 + b2) + c * x1; };
  f.vartheta = [=](double x1, double x2, double) { return v0 + v1 * std::sin(x1 - x2); };
  f.label = label;
  return f;
}

// Two-particle angle that depends on the separation only.
inline TwoCoinField distance_pair(double amp, int label) {
  TwoCoinField f;
  f.theta = [=](double x1, double x2, double) { return 0.3 + amp * std::cos(3.0 * (x1 - x2)); };
  f.vartheta = [=](double x1, double x2, double) { return 0.2 * std::cos(x1 - x2); };
  f.label = label;
  return f;
}

// theta2 = -2 theta1 = acos((x1 - x2)^2), vartheta1 = v1 - 0.2 x2, vartheta2 = v2 + 0.1 x1.
inline std::pair<TwoCoinField, TwoCoinField> separation_pair(double v1, double v2) {
  auto th2 = [](double x1, double x2, double) { return std::acos((x1 - x2) * (x1 - x2)); };
  auto d2 = [](double x1, double x2, double) {
    const double d = x1 - x2;
    return -2.0 * d / std::sqrt(1.0 - d * d * d * d);
  };
  TwoCoinField c2;
  c2.theta = th2;
  c2.dtheta_dx1 = d2;
  c2.dtheta_dx2 = [d2](double x1, double x2, double t) { return -d2(x1, x2, t); };
  c2.vartheta = [=](double x1, double, double) { return v2 + 0.1 * x1; };
  c2.label = 2;
  TwoCoinField c1;
  c1.theta = [th2](double x1, double x2, double t) { return -0.5 * th2(x1, x2, t); };
  c1.dtheta_dx1 = [d2](double x1, double x2, double t) { return -0.5 * d2(x1, x2, t); };
  c1.dtheta_dx2 = [d2](double x1, double x2, double t) { return 0.5 * d2(x1, x2, t); };
  c1.vartheta = [=](double, double x2, double) { return v1 - 0.2 * x2; };
  c1.label = 1;
  return {c1, c2};
}

}  // namespace sdqw::samples
