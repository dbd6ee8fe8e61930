#pragma once

#include "sdqw/common.hpp"

#include <span>
#include <vector>

namespace sdqw {

enum class Boundary { Periodic };

// Uniform periodic 1-D lattice; site j sits at x = (j - origin) * spacing.
class Lattice {
 public:
  Lattice(int n_sites, double spacing, int origin_index);

  int n_sites() const { return n_sites_; }
  double spacing() const { return spacing_; }
  int origin_index() const { return origin_; }
  Boundary boundary() const { return Boundary::Periodic; }

  double position(int j) const { return (j - origin_) * spacing_; }
  std::vector<double> positions() const;
  int wrap(int j) const;
  // Site whose position is closest to x (no wrapping).
  int nearest_site(double x) const;

  bool operator==(const Lattice& other) const = default;

 private:
  int n_sites_;
  double spacing_;
  int origin_;
};

Lattice make_lattice(int n_sites, double spacing);

struct MomentumGrid {
  std::vector<double> values;  // ascending
  double step = 0.0;
};

MomentumGrid momentum_values(const Lattice& lattice);

// Amplitudes indexed (c, j) with the coin index major: index = c * n_sites + j.
class WalkState {
 public:
  WalkState(Lattice lattice, int coin_dim);
  WalkState(Lattice lattice, int coin_dim, CVector amplitudes);

  const Lattice& lattice() const { return lattice_; }
  int coin_dim() const { return coin_dim_; }
  const CVector& amplitudes() const { return amp_; }
  CVector& amplitudes() { return amp_; }
  Complex amplitude(int c, int j) const { return amp_[c * lattice_.n_sites() + j]; }
  double norm_squared() const { return amp_.squaredNorm(); }

 private:
  Lattice lattice_;
  int coin_dim_;
  CVector amp_;
};

WalkState initial_state(std::span<const Complex> coin_amplitudes, int site_index,
                        const Lattice& lattice);

std::vector<double> probability_profile(const WalkState& state);
std::vector<double> probability_profile(const CVector& amplitudes, int coin_dim, int n_sites);

double inverse_participation_ratio(std::span<const double> profile);

// Probability at or above which an edge site counts as reached by the walker.
inline constexpr double kWrapThreshold = 1e-15;

bool touches_boundary(std::span<const double> profile);

}  // namespace sdqw
