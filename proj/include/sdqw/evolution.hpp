#pragma once

#include "sdqw/lattice.hpp"
#include "sdqw/operators.hpp"

#include <string>
#include <vector>

namespace sdqw {

enum class StepMode { Conventional, Modified };

struct StepBuilder {
  CoinSource coin1;
  CoinSource coin2;
  Lattice lattice;
  StepMode mode = StepMode::Modified;
};

// U(t, tau) = S+ C2(t, tau) S- C1(t, tau)
LinearOperator conventional_step(const StepBuilder& builder, double t, double tau);
// C1^dagger(t, 0) C2^dagger(t, 0) U(t, tau)
LinearOperator modified_step(const StepBuilder& builder, double t, double tau);
LinearOperator step_operator(const StepBuilder& builder, double t, double tau);

// Structured step: coins sampled once, applied site-wise; shifts as permutations.
class StepKernel {
 public:
  StepKernel(const StepBuilder& builder, double t, double tau);

  void apply(CVector& v) const;
  void apply_adjoint(CVector& v) const;
  double max_pre_projection_defect() const { return defect_; }

 private:
  int n_sites_;
  bool modified_;
  std::vector<Eigen::Matrix2cd> c1_, c2_, c1_zero_, c2_zero_;
  double defect_ = 0.0;
};

struct EvolveOptions {
  bool dense = false;
  std::string scenario;
  double mass = 0.0;
};

struct TrajectoryMetadata {
  std::string scenario;
  double L = 0.0;
  double mass = 0.0;
  double max_norm_drift = 0.0;
  double max_coin_defect = 0.0;
  int first_wrap_step = -1;  // -1: support never reached an edge site
  std::vector<std::string> warnings;
};

struct Trajectory {
  std::vector<std::vector<double>> profiles;  // index 0 is the initial profile
  std::vector<double> times;
  TrajectoryMetadata metadata;
  CVector final_amplitudes;
};

// Steps at t = 0, tau, 2 tau, ... with tau = a / c.
Trajectory evolve(const StepBuilder& builder, const WalkState& initial, int n_steps,
                  const EvolveOptions& options = {});

}  // namespace sdqw
