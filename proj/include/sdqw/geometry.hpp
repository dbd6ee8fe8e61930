#pragma once

#include "sdqw/lattice.hpp"
#include "sdqw/operators.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdqw {

// Diagonal (1+1)-D vielbein, U(1) potential and mass.
struct MetricSpec {
  ScalarField e00;
  ScalarField e11;
  ScalarField A0;
  ScalarField A1;
  ScalarField mass;
  // Optional analytic d/dx of e11/e00; the lattice central difference is used otherwise.
  ScalarField ratio_dx;

  double ratio(double x, double t) const { return e11(x, t) / e00(x, t); }
};

MetricSpec flat_metric(double mass);

// How the underdetermined sums are divided between the two coins.
enum class MassSplit {
  CancelGradientOnCoin1,  // vartheta1 = -c d(theta1)/dx, the rest on coin 2
  AllOnCoin2,             // vartheta1 = 0
};
enum class PotentialSplit { Coin1, Coin2 };

struct MappingOptions {
  MassSplit mass_split = MassSplit::CancelGradientOnCoin1;
  PotentialSplit potential_split = PotentialSplit::Coin1;
};

struct CoinPair {
  RestrictedCoinField coin1;
  RestrictedCoinField coin2;
  // Gauge convention for the reconstructed phase: xi1 = 0 at the leftmost site.
  std::string phase_convention;
};

CoinPair metric_to_coin(const MetricSpec& spec, const Lattice& lattice,
                        const MappingOptions& options = {},
                        std::span<const double> check_times = {});

struct MetricRecovery {
  MetricSpec spec;
  // Sites where cos(2 theta1) vanishes at a checked time; A1 is singular there.
  std::vector<int> a1_singular_sites;
};

MetricRecovery coin_to_metric(const RestrictedCoinField& coin1, const RestrictedCoinField& coin2,
                              const ScalarField& e00, const Lattice& lattice,
                              std::span<const double> check_times = {});

// -A0 + c sigma_3 1/2{e11/e00, P} - sigma_3 (e11/e00) A1 + c^2 sigma_1 m/e00 (hbar = 1).
CMatrix dirac_hamiltonian_1p1(const MetricSpec& spec, const Lattice& lattice, double t);

double dispersion(double k, double theta1, double theta2, double tau, double a);

struct LightCone {
  double left = 0.0;
  double right = 0.0;
};

// Integrates dx/dt = -/+ e11/e00 from (x0, 0) with an adaptive Dormand-Prince scheme.
LightCone light_cone_boundary(double x0, double t, const MetricSpec& spec);
// Closed form for e11 = x + offset, e00 = 1.
LightCone linear_light_cone(double x0, double t, double offset);

struct Embedding2p1 {
  double k_y = 0.0;
  std::vector<double> e2_0, e1_2, e1_1, e2_1, e2_2;  // ratios to e00
  std::vector<double> A0, A1, A2;
  std::vector<double> mass_over_e00;
  std::vector<Eigen::Matrix3d> metric;  // g^{mu nu} / e00^2
};

Embedding2p1 embed_2p1(const RestrictedCoinField& coin1, const RestrictedCoinField& coin2,
                       double k_y, const Lattice& lattice, double t);

struct MonotonicityReport {
  bool applicable = false;
  bool monotone = false;
  std::optional<std::pair<double, double>> violation;  // |k| values with E not increasing
  std::string message;
};

MonotonicityReport monotonicity_check(double theta1, double theta2, double tau, double a,
                                      int samples = 10000);

}  // namespace sdqw
