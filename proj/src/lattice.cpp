#include "sdqw/lattice.hpp"

#include <cmath>
#include <numbers>

namespace sdqw {

Lattice::Lattice(int n_sites, double spacing, int origin_index)
    : n_sites_(n_sites), spacing_(spacing), origin_(origin_index) {
  if (n_sites < 2) throw ValidationError("lattice needs at least 2 sites");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw ValidationError("lattice spacing must be positive and finite");
}

std::vector<double> Lattice::positions() const {
  std::vector<double> xs(static_cast<std::size_t>(n_sites_));
  for (int j = 0; j < n_sites_; ++j) xs[static_cast<std::size_t>(j)] = position(j);
  return xs;
}

int Lattice::wrap(int j) const {
  const int r = j % n_sites_;
  return r < 0 ? r + n_sites_ : r;
}

int Lattice::nearest_site(double x) const {
  const long j = std::lround(x / spacing_) + origin_;
  if (j < 0 || j >= n_sites_) throw ValidationError("position outside the lattice");
  return static_cast<int>(j);
}

Lattice make_lattice(int n_sites, double spacing) {
  return Lattice(n_sites, spacing, n_sites / 2);
}

MomentumGrid momentum_values(const Lattice& lattice) {
  const int n = lattice.n_sites();
  const double dk = 2.0 * std::numbers::pi * kHbar / (n * lattice.spacing());
  MomentumGrid grid;
  grid.step = dk;
  grid.values.reserve(static_cast<std::size_t>(n));
  // Odd n: symmetric about zero. Even n: the top value is +pi/a.
  const int lowest = (n % 2 == 1) ? -(n - 1) / 2 : -(n / 2 - 1);
  for (int m = 0; m < n; ++m) grid.values.push_back((lowest + m) * dk);
  return grid;
}

WalkState::WalkState(Lattice lattice, int coin_dim)
    : lattice_(lattice), coin_dim_(coin_dim),
      amp_(CVector::Zero(static_cast<Eigen::Index>(coin_dim) * lattice.n_sites())) {
  if (coin_dim < 1) throw ValidationError("coin dimension must be positive");
}

WalkState::WalkState(Lattice lattice, int coin_dim, CVector amplitudes)
    : lattice_(lattice), coin_dim_(coin_dim), amp_(std::move(amplitudes)) {
  if (coin_dim < 1) throw ValidationError("coin dimension must be positive");
  if (amp_.size() != static_cast<Eigen::Index>(coin_dim) * lattice.n_sites())
    throw ValidationError("amplitude vector has the wrong length");
}

WalkState initial_state(std::span<const Complex> coin_amplitudes, int site_index,
                        const Lattice& lattice) {
  if (coin_amplitudes.empty()) throw ValidationError("empty coin vector");
  if (site_index < 0 || site_index >= lattice.n_sites())
    throw ValidationError("initial site index out of range");
  double norm = 0.0;
  for (const Complex& c : coin_amplitudes) norm += std::norm(c);
  if (std::abs(norm - 1.0) > 1e-10) throw ValidationError("coin vector is not normalized");
  const int dim = static_cast<int>(coin_amplitudes.size());
  WalkState state(lattice, dim);
  for (int c = 0; c < dim; ++c)
    state.amplitudes()[c * lattice.n_sites() + site_index] =
        coin_amplitudes[static_cast<std::size_t>(c)];
  return state;
}

std::vector<double> probability_profile(const CVector& amplitudes, int coin_dim, int n_sites) {
  std::vector<double> p(static_cast<std::size_t>(n_sites), 0.0);
  for (int c = 0; c < coin_dim; ++c)
    for (int j = 0; j < n_sites; ++j)
      p[static_cast<std::size_t>(j)] += std::norm(amplitudes[c * n_sites + j]);
  return p;
}

std::vector<double> probability_profile(const WalkState& state) {
  return probability_profile(state.amplitudes(), state.coin_dim(), state.lattice().n_sites());
}

double inverse_participation_ratio(std::span<const double> profile) {
  double s = 0.0;
  for (double p : profile) s += p * p;
  return s;
}

bool touches_boundary(std::span<const double> profile) {
  if (profile.empty()) return false;
  return profile.front() >= kWrapThreshold || profile.back() >= kWrapThreshold;
}

}  // namespace sdqw
