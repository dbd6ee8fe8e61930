#pragma once

#include "sdqw/common.hpp"
#include "sdqw/lattice.hpp"

#include <span>
#include <variant>
#include <vector>

namespace sdqw {

enum class ShiftDirection { Plus, Minus };

// General U(2) coin e^{i xi} [[F, G], [-G*, F*]] with a first-order model in tau:
// entries F + tau f, G + tau g and phase xi + tau lambda.
struct CoinField {
  ComplexField F, G, f, g;
  ScalarField xi, lambda;
  // Optional x-derivatives of the tau = 0 parts. Empty means "not supplied".
  ComplexField dF, dG;
  ScalarField dxi;
  int label = 1;
};

// Rotation about the spin-x axis: F = cos(theta), G = -i sin(theta),
// theta(x, t, tau) = theta + tau * vartheta.
struct RestrictedCoinField {
  ScalarField theta, vartheta, xi, lambda;
  ScalarField dtheta, dxi;  // optional
  int label = 1;

  CoinField to_coin_field() const;
};

using CoinSource = std::variant<CoinField, RestrictedCoinField>;

struct LinearOperator {
  CMatrix matrix;
  int coin_dim = 2;
  int n_sites = 0;
  bool unitary = true;
  // Largest per-site norm defect seen before projection (general coins only).
  double pre_projection_defect = 0.0;

  double unitarity_defect() const { return sdqw::unitarity_defect(matrix); }
};

// Norm defects above this (after removing the exact tau^2 term) mean an inconsistent field.
inline constexpr double kCoinDefectLimit = 1e-6;

Eigen::Matrix2cd coin_matrix(Complex F, Complex G, double xi);

// Per-site coin blocks at (t, tau). The general form is projected to exact unitarity.
Eigen::Matrix2cd sample_coin(const CoinField& field, double x, double t, double tau,
                             double* pre_projection_defect = nullptr);
Eigen::Matrix2cd sample_coin(const RestrictedCoinField& field, double x, double t, double tau);
Eigen::Matrix2cd sample_coin(const CoinSource& field, double x, double t, double tau,
                             double* pre_projection_defect = nullptr);

std::vector<Eigen::Matrix2cd> sample_coins(const CoinSource& field, const Lattice& lattice,
                                           double t, double tau,
                                           double* max_defect = nullptr);

LinearOperator build_shift(const Lattice& lattice, ShiftDirection direction, int coin_dim);
LinearOperator build_coin(const CoinField& field, double t, double tau, const Lattice& lattice);
LinearOperator build_coin_restricted(const RestrictedCoinField& field, double t, double tau,
                                     const Lattice& lattice);
LinearOperator build_coin(const CoinSource& field, double t, double tau, const Lattice& lattice);

// Dense operator from per-site coin blocks (coin-major layout).
CMatrix coin_blocks_to_matrix(std::span<const Eigen::Matrix2cd> blocks);
CMatrix coin_blocks_to_matrix(std::span<const CMatrix> blocks, int coin_dim);

// Structured application paths.
void apply_site_coins(std::span<const Eigen::Matrix2cd> blocks, CVector& v);
void apply_site_coins_adjoint(std::span<const Eigen::Matrix2cd> blocks, CVector& v);
void apply_site_blocks(std::span<const CMatrix> blocks, int coin_dim, CVector& v);
void apply_site_blocks_adjoint(std::span<const CMatrix> blocks, int coin_dim, CVector& v);
// First half of the coin indices move on Plus, second half on Minus.
void apply_shift(ShiftDirection direction, int coin_dim, int n_sites, CVector& v);
void apply_shift_adjoint(ShiftDirection direction, int coin_dim, int n_sites, CVector& v);

// x-derivatives on lattice sites: analytic when supplied, else the periodic
// central difference (f(x_{j+1}) - f(x_{j-1})) / 2a.
enum class DerivativePolicy { AnalyticOnly, AllowFallback };

struct DerivativeSample {
  std::vector<double> values;
  bool used_fallback = false;
};

struct ComplexDerivativeSample {
  std::vector<Complex> values;
  bool used_fallback = false;
};

DerivativeSample sample_derivative(const ScalarField& field, const ScalarField& analytic,
                                   const Lattice& lattice, double t, DerivativePolicy policy,
                                   const char* name);
ComplexDerivativeSample sample_derivative(const ComplexField& field, const ComplexField& analytic,
                                          const Lattice& lattice, double t,
                                          DerivativePolicy policy, const char* name);

}  // namespace sdqw
