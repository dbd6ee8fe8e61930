#pragma once

#include "sdqw/evolution.hpp"
#include "sdqw/hamiltonian.hpp"
#include "sdqw/lattice.hpp"
#include "sdqw/operators.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace sdqw {

// Identity followed by the N^2 - 1 generalized Gell-Mann matrices
// (symmetric and antisymmetric pairs in (j, k) order, then the diagonal ones),
// normalized as Tr(L_p L_q) = 2 delta_pq for p, q >= 1.
struct GeneratorSet {
  int N = 1;
  std::vector<CMatrix> matrices;

  int size() const { return static_cast<int>(matrices.size()); }
};

GeneratorSet make_generators(int N);

// Potential weight for generator q at (x, t).
using GaugeWeight = std::function<double(int q, double x, double t)>;

// Coin on C^2 (x) C^N: e^{i xi} [[F, G], [-G*, F*]] (x) 1_N followed by
// blockdiag(exp(-i tau sum_q omega^q L_q), exp(-i tau sum_q Omega^q L_q)).
// Coin index within a site is s * N + n, s the spin index.
struct GaugeCoinField {
  CoinSource base;
  GaugeWeight omega, Omega;
};

// exp(-i tau sum_q w_q L_q) by eigendecomposition of the Hermitian exponent.
CMatrix gauge_exponential(const GeneratorSet& generators, std::span<const double> weights,
                          double tau);

CMatrix sample_gauge_coin(const GaugeCoinField& field, const GeneratorSet& generators, double x,
                          double t, double tau);
std::vector<CMatrix> sample_gauge_coins(const GaugeCoinField& field, const GeneratorSet& generators,
                                        const Lattice& lattice, double t, double tau);

LinearOperator build_coin_un(const GaugeCoinField& field, const GeneratorSet& generators, double t,
                             double tau, const Lattice& lattice);

struct GaugeStepBuilder {
  GaugeCoinField coin1, coin2;
  GeneratorSet generators;
  Lattice lattice;
  StepMode mode = StepMode::Modified;

  // The U(1) walk obtained by dropping the gauge exponentials.
  StepBuilder base() const { return {coin1.base, coin2.base, lattice, mode}; }
};

// Dense S+ C2 S- C1, optionally preceded by C1^dagger(t, 0) C2^dagger(t, 0).
// The gauge exponentials are the identity at tau = 0.
LinearOperator gauge_step_operator(const GaugeStepBuilder& builder, double t, double tau);

class GaugeStepKernel {
 public:
  GaugeStepKernel(const GaugeStepBuilder& builder, double t, double tau);

  void apply(CVector& v) const;
  void apply_adjoint(CVector& v) const;
  int coin_dim() const { return coin_dim_; }

 private:
  int n_sites_;
  int coin_dim_;
  bool modified_;
  std::vector<CMatrix> c1_, c2_, c1_zero_, c2_zero_;
};

// chi[r][q] on lattice sites.
struct ChiGrids {
  int N = 1;
  std::array<std::vector<RVector>, 4> chi;
};

ChiGrids chi_coefficients(const GaugeCoinField& coin1, const GaugeCoinField& coin2, int N,
                          const Lattice& lattice, double t);

// H_eff,N = H_U(1) (x) 1_N + sum_r sigma_r (x) sum_q L_q chi^q_r, all diagonal in position.
CVector apply_gauge_hamiltonian(const HamiltonianCoefficients& base, const ChiGrids& chi,
                                const GeneratorSet& generators, const MomentumOperator& p,
                                const CVector& psi);
CMatrix assemble_gauge_hamiltonian(const HamiltonianCoefficients& base, const ChiGrids& chi,
                                   const GeneratorSet& generators, const Lattice& lattice);

CVector apply_gauge_numeric_generator(const GaugeStepKernel& kernel, double tau, const CVector& psi);
CVector apply_gauge_numeric_generator_adjoint(const GaugeStepKernel& kernel, double tau,
                                              const CVector& psi);

// Packets from the default bank tensored with fixed spin-colour states.
std::vector<CVector> gauge_test_bank(const Lattice& lattice, int N);

using GaugeBuilderFactory = std::function<GaugeStepBuilder(const Lattice&)>;

ConvergenceReport gauge_convergence_order(const GaugeBuilderFactory& builder,
                                          std::span<const double> L_list,
                                          const ConvergenceWindow& window = {});

}  // namespace sdqw
