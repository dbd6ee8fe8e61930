#pragma once

#include "sdqw/evolution.hpp"
#include "sdqw/hamiltonian.hpp"
#include "sdqw/lattice.hpp"
#include "sdqw/operators.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace sdqw {

using RMatrix = Eigen::MatrixXd;
using PairField = std::function<double(double x1, double x2, double t)>;

// Entangling coin exp(-i theta sigma_1 (x) sigma_1) at every site pair,
// theta(x1, x2, t, tau) = theta + tau * vartheta. Only the (1, 1) channel is modelled.
struct TwoCoinField {
  PairField theta, vartheta;
  PairField dtheta_dx1, dtheta_dx2;  // optional
  int label = 1;
};

// Amplitudes over (c1, c2, j1, j2): index = ((c1 * 2 + c2) * N + j1) * N + j2.
class TwoParticleState {
 public:
  TwoParticleState(Lattice lattice, CVector amplitudes);

  const Lattice& lattice() const { return lattice_; }
  const CVector& amplitudes() const { return amp_; }
  CVector& amplitudes() { return amp_; }
  Complex amplitude(int c1, int c2, int j1, int j2) const;

 private:
  Lattice lattice_;
  CVector amp_;
};

inline constexpr double kTwoParticleNormTolerance = 1e-10;
// Largest per-particle lattice accepted by the dense builders.
inline constexpr int kMaxDenseTwoParticleSites = 64;

inline Eigen::Index pair_index(int c1, int c2, int j1, int j2, int n) {
  return ((static_cast<Eigen::Index>(c1) * 2 + c2) * n + j1) * n + j2;
}

// Product of single-particle states (coin (x) position each).
TwoParticleState product_state(std::span<const Complex> coin1, int site1,
                               std::span<const Complex> coin2, int site2, const Lattice& lattice);

// Per-pair angles theta + tau vartheta, row j1, column j2.
RMatrix sample_pair_angles(const TwoCoinField& field, const Lattice& lattice, double t, double tau);

LinearOperator build_two_coin(const TwoCoinField& field, double t, double tau, const Lattice& lattice);
LinearOperator build_two_shift(const Lattice& lattice, ShiftDirection direction);
LinearOperator two_particle_step(const TwoCoinField& coin1, const TwoCoinField& coin2, double t,
                                 double tau, const Lattice& lattice,
                                 StepMode mode = StepMode::Modified);

class TwoParticleKernel {
 public:
  TwoParticleKernel(const TwoCoinField& coin1, const TwoCoinField& coin2, const Lattice& lattice,
                    double t, double tau, StepMode mode = StepMode::Modified);

  void apply(CVector& v) const;
  void apply_adjoint(CVector& v) const;
  int n_sites() const { return n_; }

 private:
  int n_;
  bool modified_;
  RMatrix a1_, a2_, a1_zero_, a2_zero_;
};

// Joint swap (c1, c2, j1, j2) -> (c2, c1, j2, j1).
CVector exchange(const CVector& psi, int n_sites);
CMatrix exchange_matrix(int n_sites);

// Von Neumann entropy (natural log) of particle 1's reduced state on coin (x) position.
double entanglement_entropy(const CVector& psi, int n_sites);

// p(x1, x2) summed over both coins; row j1, column j2.
RMatrix joint_probability(const CVector& psi, int n_sites);

struct JointFrame {
  int step = 0;
  RMatrix probability;
};

// Header "step,site1,site2,x1,x2,p".
void write_joint_probability_csv(std::ostream& out, const Lattice& lattice,
                                 std::span<const JointFrame> frames);

// Channels of H_two. Xi grids are complex (Xi_03, Xi_30, Xi_12, Xi_21 purely imaginary),
// Theta grids real, Xi_11 real. Superscripts name the momentum each Theta multiplies.
struct TwoParticleCoefficients {
  CMatrix xi03, xi30, xi12, xi21;
  RMatrix xi11;
  RMatrix theta03_p2, theta30_p1, theta12_p2, theta21_p1;
  bool used_fallback = false;

  static TwoParticleCoefficients zeros(int n_sites);
};

TwoParticleCoefficients two_coefficients(const TwoCoinField& coin1, const TwoCoinField& coin2,
                                         double t, const Lattice& lattice,
                                         DerivativePolicy policy = DerivativePolicy::AllowFallback);

// H = sum over channels (s_r1 (x) s_r2) (x) [Re Xi + c/2 {Theta, p_k}].
CVector apply_two_hamiltonian(const TwoParticleCoefficients& coefficients, const MomentumOperator& p,
                              const CVector& psi);
CMatrix assemble_two_hamiltonian(const TwoParticleCoefficients& coefficients, const Lattice& lattice);

// H1 (x) s0 carries the (3,0) channel, s0 (x) H2 the (0,3) channel, the rest is H_inter.
struct TwoHamiltonianSplit {
  TwoParticleCoefficients first, second, interaction;
};

TwoHamiltonianSplit hamiltonian_split(const TwoParticleCoefficients& coefficients);

CVector apply_two_numeric_generator(const TwoParticleKernel& kernel, double tau, const CVector& psi);
CVector apply_two_numeric_generator_adjoint(const TwoParticleKernel& kernel, double tau,
                                            const CVector& psi);

// 1/4 Tr_coin[(s_r1 (x) s_r2) H_num] applied to a position-space vector phi (N^2 entries).
CVector channel_projection(const TwoParticleKernel& kernel, double tau, int r1, int r2,
                           const CVector& phi);

// Two-dimensional Gaussian packets tensored with fixed two-coin states.
std::vector<CVector> two_particle_position_bank(const Lattice& lattice);
std::vector<CVector> two_particle_test_bank(const Lattice& lattice);

struct TwoFieldPair {
  TwoCoinField coin1, coin2;
};

using TwoFieldFactory = std::function<TwoFieldPair(const Lattice&)>;

ConvergenceReport two_particle_convergence_order(const TwoFieldFactory& fields,
                                                 std::span<const double> L_list,
                                                 const ConvergenceWindow& window = {0.64, 0.0});

}  // namespace sdqw
