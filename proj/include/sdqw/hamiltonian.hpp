#pragma once

#include "sdqw/evolution.hpp"
#include "sdqw/lattice.hpp"
#include "sdqw/operators.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sdqw {

// One coin at one point: tau = 0 entries, first-order terms, x-derivatives.
struct CoinJet {
  Complex F{1.0, 0.0}, G{0.0, 0.0}, f{0.0, 0.0}, g{0.0, 0.0}, dF{0.0, 0.0}, dG{0.0, 0.0};
  double lambda = 0.0, dxi = 0.0;
};

struct RestrictedJet {
  double theta = 0.0, vartheta = 0.0, dtheta = 0.0, lambda = 0.0, dxi = 0.0;

  CoinJet to_general() const;
};

// Xi_r (complex) and Theta_r (real) at one point; theta[0] is always 0.
struct CoefficientPoint {
  std::array<Complex, 4> xi{};
  std::array<double, 4> theta{};
};

CoefficientPoint general_coefficients(const CoinJet& c1, const CoinJet& c2);
CoefficientPoint restricted_coefficients(const RestrictedJet& c1, const RestrictedJet& c2);
// Closed forms for the comparable family theta2 = -2 theta1 (c2.theta, c2.dtheta unused).
CoefficientPoint comparable_coefficients(const RestrictedJet& c1, const RestrictedJet& c2);

enum class CoefficientProvenance { GeneralU2, Restricted, RestrictedTheta2MinusTwoTheta1 };

std::string to_string(CoefficientProvenance p);

struct HamiltonianCoefficients {
  std::array<CVector, 4> xi;
  std::array<RVector, 4> theta;
  CoefficientProvenance provenance = CoefficientProvenance::GeneralU2;
  bool used_fallback = false;
};

// Tolerance for recognizing theta2 = -2 theta1 on every site.
inline constexpr double kComparableTolerance = 1e-10;

HamiltonianCoefficients coefficients_general(const CoinField& coin1, const CoinField& coin2,
                                             double t, const Lattice& lattice,
                                             DerivativePolicy policy = DerivativePolicy::AllowFallback);
HamiltonianCoefficients coefficients_restricted(
    const RestrictedCoinField& coin1, const RestrictedCoinField& coin2, double t,
    const Lattice& lattice, DerivativePolicy policy = DerivativePolicy::AllowFallback);
// Restricted formulas when both coins are restricted, general ones otherwise.
HamiltonianCoefficients coefficients_for(const StepBuilder& builder, double t,
                                         DerivativePolicy policy = DerivativePolicy::AllowFallback);

// Spectral momentum on a periodic lattice (diagonal k in Fourier space).
class MomentumOperator {
 public:
  explicit MomentumOperator(const Lattice& lattice);
  ~MomentumOperator();
  MomentumOperator(const MomentumOperator&) = delete;
  MomentumOperator& operator=(const MomentumOperator&) = delete;

  // out = P in, for one block of n_sites entries.
  void apply(const Complex* in, Complex* out) const;
  CMatrix matrix() const;
  const std::vector<double>& fft_momenta() const { return k_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<double> k_;
};

// H = sum_r sigma_r (x) diag(Re Xi_r) + c sum_r sigma_r (x) 1/2 {diag(Theta_r), P}.
// The imaginary part of Xi_r is the ordering term -(c/2) dTheta_r/dx already carried by
// the symmetrized product, so the assembled matrix is exactly Hermitian.
CMatrix assemble(const HamiltonianCoefficients& coefficients, const Lattice& lattice);
CVector apply_hamiltonian(const HamiltonianCoefficients& coefficients, const MomentumOperator& p,
                          const CVector& psi);

// H_num = (i / tau) (U_mod(t, tau) - I)
CMatrix numeric_generator(const StepBuilder& builder, double t, double tau);
CVector apply_numeric_generator(const StepKernel& kernel, double tau, const CVector& psi);
CVector apply_numeric_generator_adjoint(const StepKernel& kernel, double tau, const CVector& psi);

// Smooth Gaussian packets (width >= 8a at L >= 100) with momenta commensurate with the
// periodic window, each tensored with several coin states.
struct TestPacket {
  double center;
  double width;
  double momentum;
};

const std::vector<TestPacket>& default_test_packets();
std::vector<CVector> gaussian_bank(const Lattice& lattice, std::span<const CVector> coin_states);
std::vector<CVector> smooth_test_bank(const Lattice& lattice);

struct ConvergenceRow {
  double L = 0.0;
  double error = 0.0;
  double hermiticity_defect = 0.0;
};

enum class ConvergenceStatus { Ok, Degenerate, NonMonotone };

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;             // d log(error) / d log(1/L)
  double hermiticity_slope = 0.0;
  ConvergenceStatus status = ConvergenceStatus::Ok;
  std::string diagnostics;
};

// Errors below this count as identically zero.
inline constexpr double kDegenerateError = 1e-12;

// Generic driver: measure(L) returns one row per resolution.
ConvergenceReport convergence_order(const std::function<ConvergenceRow(double L)>& measure,
                                    std::span<const double> L_list);

struct ConvergenceWindow {
  double half_width = 0.8;  // physical half-width of the lattice, fixed while L grows
  double t = 0.0;
};

int window_sites(double L, double half_width);

using BuilderFactory = std::function<StepBuilder(const Lattice&)>;
using CoefficientFn = std::function<HamiltonianCoefficients(const StepBuilder&, double t)>;

ConvergenceReport convergence_order(const BuilderFactory& builder, const CoefficientFn& coefficients,
                                    std::span<const double> L_list,
                                    const ConvergenceWindow& window = {});

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);

double fit_slope(std::span<const double> log_x, std::span<const double> log_y);

}  // namespace sdqw
