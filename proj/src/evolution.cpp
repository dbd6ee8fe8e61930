#include "sdqw/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdqw {

namespace {

// Cyclic move of one coin block by +-1 site.
void rotate_block(CVector& v, int block, int n, int step) {
  Complex* seg = v.data() + static_cast<std::ptrdiff_t>(block) * n;
  if (step > 0)
    std::rotate(seg, seg + n - 1, seg + n);
  else
    std::rotate(seg, seg + 1, seg + n);
}

}  // namespace

LinearOperator conventional_step(const StepBuilder& builder, double t, double tau) {
  const Lattice& lat = builder.lattice;
  const auto c1 = build_coin(builder.coin1, t, tau, lat);
  const auto c2 = build_coin(builder.coin2, t, tau, lat);
  const auto sp = build_shift(lat, ShiftDirection::Plus, 2);
  const auto sm = build_shift(lat, ShiftDirection::Minus, 2);
  LinearOperator out;
  out.matrix = sp.matrix * c2.matrix * sm.matrix * c1.matrix;
  out.coin_dim = 2;
  out.n_sites = lat.n_sites();
  out.pre_projection_defect = std::max(c1.pre_projection_defect, c2.pre_projection_defect);
  return out;
}

LinearOperator modified_step(const StepBuilder& builder, double t, double tau) {
  LinearOperator u = conventional_step(builder, t, tau);
  const auto c1 = build_coin(builder.coin1, t, 0.0, builder.lattice);
  const auto c2 = build_coin(builder.coin2, t, 0.0, builder.lattice);
  u.matrix = c1.matrix.adjoint() * (c2.matrix.adjoint() * u.matrix);
  return u;
}

LinearOperator step_operator(const StepBuilder& builder, double t, double tau) {
  return builder.mode == StepMode::Modified ? modified_step(builder, t, tau)
                                            : conventional_step(builder, t, tau);
}

StepKernel::StepKernel(const StepBuilder& builder, double t, double tau)
    : n_sites_(builder.lattice.n_sites()), modified_(builder.mode == StepMode::Modified) {
  double d1 = 0.0, d2 = 0.0;
  c1_ = sample_coins(builder.coin1, builder.lattice, t, tau, &d1);
  c2_ = sample_coins(builder.coin2, builder.lattice, t, tau, &d2);
  defect_ = std::max(d1, d2);
  if (modified_) {
    c1_zero_ = sample_coins(builder.coin1, builder.lattice, t, 0.0);
    c2_zero_ = sample_coins(builder.coin2, builder.lattice, t, 0.0);
  }
}

void StepKernel::apply(CVector& v) const {
  apply_site_coins(c1_, v);
  apply_shift(ShiftDirection::Minus, 2, n_sites_, v);
  apply_site_coins(c2_, v);
  apply_shift(ShiftDirection::Plus, 2, n_sites_, v);
  if (modified_) {
    apply_site_coins_adjoint(c2_zero_, v);
    apply_site_coins_adjoint(c1_zero_, v);
  }
}

void StepKernel::apply_adjoint(CVector& v) const {
  if (modified_) {
    apply_site_coins(c1_zero_, v);
    apply_site_coins(c2_zero_, v);
  }
  rotate_block(v, 0, n_sites_, -1);
  apply_site_coins_adjoint(c2_, v);
  rotate_block(v, 1, n_sites_, +1);
  apply_site_coins_adjoint(c1_, v);
}

Trajectory evolve(const StepBuilder& builder, const WalkState& initial, int n_steps,
                  const EvolveOptions& options) {
  if (n_steps < 0) throw ValidationError("n_steps must be non-negative");
  if (initial.coin_dim() != 2) throw ValidationError("single-particle evolution needs a 2-dim coin");
  if (!(initial.lattice() == builder.lattice))
    throw ValidationError("state and step builder use different lattices");

  const Lattice& lat = builder.lattice;
  const double tau = lat.spacing() / kLightSpeed;
  Trajectory traj;
  traj.metadata.scenario = options.scenario;
  traj.metadata.L = 1.0 / lat.spacing();
  traj.metadata.mass = options.mass;
  traj.profiles.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);

  CVector psi = initial.amplitudes();
  traj.profiles.push_back(probability_profile(psi, 2, lat.n_sites()));
  traj.times.push_back(0.0);

  for (int k = 0; k < n_steps; ++k) {
    const double t = k * tau;
    if (options.dense) {
      const auto op = step_operator(builder, t, tau);
      psi = op.matrix * psi;
      traj.metadata.max_coin_defect = std::max(traj.metadata.max_coin_defect, op.pre_projection_defect);
    } else {
      const StepKernel kernel(builder, t, tau);
      kernel.apply(psi);
      traj.metadata.max_coin_defect =
          std::max(traj.metadata.max_coin_defect, kernel.max_pre_projection_defect());
    }
    auto profile = probability_profile(psi, 2, lat.n_sites());
    double total = 0.0;
    for (double p : profile) total += p;
    traj.metadata.max_norm_drift = std::max(traj.metadata.max_norm_drift, std::abs(total - 1.0));
    if (traj.metadata.first_wrap_step < 0 && touches_boundary(profile)) {
      traj.metadata.first_wrap_step = k + 1;
      std::ostringstream os;
      os << "support reached the lattice edge at step " << (k + 1)
         << "; later steps include wrapped amplitude";
      traj.metadata.warnings.push_back(os.str());
    }
    traj.profiles.push_back(std::move(profile));
    traj.times.push_back((k + 1) * tau);
  }
  if (traj.metadata.max_norm_drift > 1e-10) {
    std::ostringstream os;
    os << "norm drift " << traj.metadata.max_norm_drift << " exceeds 1e-10";
    traj.metadata.warnings.push_back(os.str());
  }
  traj.final_amplitudes = std::move(psi);
  return traj;
}

}  // namespace sdqw
