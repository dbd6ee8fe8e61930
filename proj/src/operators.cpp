#include "sdqw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdqw {

CoinField RestrictedCoinField::to_coin_field() const {
  CoinField out;
  const ScalarField th = theta;
  const ScalarField vt = vartheta;
  out.F = [th](double x, double t) { return Complex(std::cos(th(x, t)), 0.0); };
  out.G = [th](double x, double t) { return Complex(0.0, -std::sin(th(x, t))); };
  out.f = [th, vt](double x, double t) { return Complex(-vt(x, t) * std::sin(th(x, t)), 0.0); };
  out.g = [th, vt](double x, double t) { return Complex(0.0, -vt(x, t) * std::cos(th(x, t))); };
  out.xi = xi;
  out.lambda = lambda;
  if (dtheta) {
    const ScalarField d = dtheta;
    out.dF = [th, d](double x, double t) { return Complex(-std::sin(th(x, t)) * d(x, t), 0.0); };
    out.dG = [th, d](double x, double t) { return Complex(0.0, -std::cos(th(x, t)) * d(x, t)); };
  }
  out.dxi = dxi;
  out.label = label;
  return out;
}

Eigen::Matrix2cd coin_matrix(Complex F, Complex G, double xi) {
  const Complex ph = std::polar(1.0, xi);
  Eigen::Matrix2cd m;
  m << ph * F, ph * G, -ph * std::conj(G), ph * std::conj(F);
  return m;
}

Eigen::Matrix2cd sample_coin(const CoinField& field, double x, double t, double tau,
                             double* pre_projection_defect) {
  const Complex F0 = field.F(x, t), G0 = field.G(x, t);
  const Complex f = field.f(x, t), g = field.g(x, t);
  const Complex F = F0 + tau * f;
  const Complex G = G0 + tau * g;
  const double n2 = std::norm(F) + std::norm(G);
  const double defect = std::abs(n2 - 1.0 - tau * tau * (std::norm(f) + std::norm(g)));
  if (!(defect <= kCoinDefectLimit)) {
    std::ostringstream os;
    os << "coin " << field.label << " violates unitarity at x=" << x << ", t=" << t
       << " (norm defect " << defect << ")";
    throw ValidationError(os.str());
  }
  if (pre_projection_defect) *pre_projection_defect = std::abs(n2 - 1.0);
  const double s = 1.0 / std::sqrt(n2);
  return coin_matrix(F * s, G * s, field.xi(x, t) + tau * field.lambda(x, t));
}

Eigen::Matrix2cd sample_coin(const RestrictedCoinField& field, double x, double t, double tau) {
  const double th = field.theta(x, t) + tau * field.vartheta(x, t);
  if (!std::isfinite(th)) {
    std::ostringstream os;
    os << "coin " << field.label << " angle is not finite at x=" << x << ", t=" << t;
    throw DomainError(os.str(), -1, x, t);
  }
  return coin_matrix(Complex(std::cos(th), 0.0), Complex(0.0, -std::sin(th)),
                     field.xi(x, t) + tau * field.lambda(x, t));
}

Eigen::Matrix2cd sample_coin(const CoinSource& field, double x, double t, double tau,
                             double* pre_projection_defect) {
  if (const auto* r = std::get_if<RestrictedCoinField>(&field)) {
    if (pre_projection_defect) *pre_projection_defect = 0.0;
    return sample_coin(*r, x, t, tau);
  }
  return sample_coin(std::get<CoinField>(field), x, t, tau, pre_projection_defect);
}

std::vector<Eigen::Matrix2cd> sample_coins(const CoinSource& field, const Lattice& lattice,
                                           double t, double tau, double* max_defect) {
  std::vector<Eigen::Matrix2cd> blocks(static_cast<std::size_t>(lattice.n_sites()));
  double worst = 0.0;
  for (int j = 0; j < lattice.n_sites(); ++j) {
    double d = 0.0;
    try {
      blocks[static_cast<std::size_t>(j)] = sample_coin(field, lattice.position(j), t, tau, &d);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " (site " + std::to_string(j) + ")", j,
                        lattice.position(j), t);
    }
    worst = std::max(worst, d);
  }
  if (max_defect) *max_defect = worst;
  return blocks;
}

LinearOperator build_shift(const Lattice& lattice, ShiftDirection direction, int coin_dim) {
  if (coin_dim < 2 || coin_dim % 2 != 0) throw ValidationError("shift needs an even coin dimension");
  const int n = lattice.n_sites();
  const int dim = coin_dim * n;
  LinearOperator op{CMatrix::Zero(dim, dim), coin_dim, n, true, 0.0};
  const int half = coin_dim / 2;
  for (int c = 0; c < coin_dim; ++c) {
    const bool moves = (direction == ShiftDirection::Plus) ? c < half : c >= half;
    const int step = moves ? (direction == ShiftDirection::Plus ? 1 : -1) : 0;
    for (int j = 0; j < n; ++j) op.matrix(c * n + lattice.wrap(j + step), c * n + j) = 1.0;
  }
  return op;
}

CMatrix coin_blocks_to_matrix(std::span<const Eigen::Matrix2cd> blocks) {
  const int n = static_cast<int>(blocks.size());
  CMatrix m = CMatrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const auto& b = blocks[static_cast<std::size_t>(j)];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r * n + j, c * n + j) = b(r, c);
  }
  return m;
}

CMatrix coin_blocks_to_matrix(std::span<const CMatrix> blocks, int coin_dim) {
  const int n = static_cast<int>(blocks.size());
  CMatrix m = CMatrix::Zero(coin_dim * n, coin_dim * n);
  for (int j = 0; j < n; ++j) {
    const auto& b = blocks[static_cast<std::size_t>(j)];
    for (int r = 0; r < coin_dim; ++r)
      for (int c = 0; c < coin_dim; ++c) m(r * n + j, c * n + j) = b(r, c);
  }
  return m;
}

LinearOperator build_coin(const CoinField& field, double t, double tau, const Lattice& lattice) {
  double defect = 0.0;
  const auto blocks = sample_coins(CoinSource(field), lattice, t, tau, &defect);
  return {coin_blocks_to_matrix(blocks), 2, lattice.n_sites(), true, defect};
}

LinearOperator build_coin_restricted(const RestrictedCoinField& field, double t, double tau,
                                     const Lattice& lattice) {
  const auto blocks = sample_coins(CoinSource(field), lattice, t, tau);
  return {coin_blocks_to_matrix(blocks), 2, lattice.n_sites(), true, 0.0};
}

LinearOperator build_coin(const CoinSource& field, double t, double tau, const Lattice& lattice) {
  if (const auto* r = std::get_if<RestrictedCoinField>(&field))
    return build_coin_restricted(*r, t, tau, lattice);
  return build_coin(std::get<CoinField>(field), t, tau, lattice);
}

void apply_site_coins(std::span<const Eigen::Matrix2cd> blocks, CVector& v) {
  const Eigen::Index n = static_cast<Eigen::Index>(blocks.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& b = blocks[static_cast<std::size_t>(j)];
    const Complex u = v[j], d = v[n + j];
    v[j] = b(0, 0) * u + b(0, 1) * d;
    v[n + j] = b(1, 0) * u + b(1, 1) * d;
  }
}

void apply_site_coins_adjoint(std::span<const Eigen::Matrix2cd> blocks, CVector& v) {
  const Eigen::Index n = static_cast<Eigen::Index>(blocks.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& b = blocks[static_cast<std::size_t>(j)];
    const Complex u = v[j], d = v[n + j];
    v[j] = std::conj(b(0, 0)) * u + std::conj(b(1, 0)) * d;
    v[n + j] = std::conj(b(0, 1)) * u + std::conj(b(1, 1)) * d;
  }
}

namespace {

void apply_blocks(std::span<const CMatrix> blocks, int coin_dim, CVector& v, bool adjoint) {
  const Eigen::Index n = static_cast<Eigen::Index>(blocks.size());
  CVector local(coin_dim);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int c = 0; c < coin_dim; ++c) local[c] = v[c * n + j];
    const auto& b = blocks[static_cast<std::size_t>(j)];
    const CVector out = adjoint ? CVector(b.adjoint() * local) : CVector(b * local);
    for (int c = 0; c < coin_dim; ++c) v[c * n + j] = out[c];
  }
}

}  // namespace

void apply_site_blocks(std::span<const CMatrix> blocks, int coin_dim, CVector& v) {
  apply_blocks(blocks, coin_dim, v, false);
}

void apply_site_blocks_adjoint(std::span<const CMatrix> blocks, int coin_dim, CVector& v) {
  apply_blocks(blocks, coin_dim, v, true);
}

void apply_shift(ShiftDirection direction, int coin_dim, int n_sites, CVector& v) {
  const int half = coin_dim / 2;
  const int first = direction == ShiftDirection::Plus ? 0 : half;
  const int last = direction == ShiftDirection::Plus ? half : coin_dim;
  for (int c = first; c < last; ++c) {
    Complex* seg = v.data() + static_cast<std::ptrdiff_t>(c) * n_sites;
    if (direction == ShiftDirection::Plus)
      std::rotate(seg, seg + n_sites - 1, seg + n_sites);
    else
      std::rotate(seg, seg + 1, seg + n_sites);
  }
}

void apply_shift_adjoint(ShiftDirection direction, int coin_dim, int n_sites, CVector& v) {
  const int half = coin_dim / 2;
  const int first = direction == ShiftDirection::Plus ? 0 : half;
  const int last = direction == ShiftDirection::Plus ? half : coin_dim;
  for (int c = first; c < last; ++c) {
    Complex* seg = v.data() + static_cast<std::ptrdiff_t>(c) * n_sites;
    if (direction == ShiftDirection::Plus)
      std::rotate(seg, seg + 1, seg + n_sites);
    else
      std::rotate(seg, seg + n_sites - 1, seg + n_sites);
  }
}

namespace {

template <typename T, typename Field>
std::vector<T> central_difference(const Field& field, const Lattice& lattice, double t) {
  const int n = lattice.n_sites();
  std::vector<T> vals(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) vals[static_cast<std::size_t>(j)] = field(lattice.position(j), t);
  std::vector<T> d(static_cast<std::size_t>(n));
  const double h = 2.0 * lattice.spacing();
  for (int j = 0; j < n; ++j)
    d[static_cast<std::size_t>(j)] = (vals[static_cast<std::size_t>(lattice.wrap(j + 1))] -
                                      vals[static_cast<std::size_t>(lattice.wrap(j - 1))]) / h;
  return d;
}

[[noreturn]] void missing_derivative(const char* name) {
  throw ValidationError(std::string("analytic derivative '") + name +
                        "' missing and finite-difference fallback disabled");
}

}  // namespace

DerivativeSample sample_derivative(const ScalarField& field, const ScalarField& analytic,
                                   const Lattice& lattice, double t, DerivativePolicy policy,
                                   const char* name) {
  DerivativeSample out;
  if (analytic) {
    out.values.resize(static_cast<std::size_t>(lattice.n_sites()));
    for (int j = 0; j < lattice.n_sites(); ++j)
      out.values[static_cast<std::size_t>(j)] = analytic(lattice.position(j), t);
    return out;
  }
  if (policy == DerivativePolicy::AnalyticOnly) missing_derivative(name);
  out.values = central_difference<double>(field, lattice, t);
  out.used_fallback = true;
  return out;
}

ComplexDerivativeSample sample_derivative(const ComplexField& field, const ComplexField& analytic,
                                          const Lattice& lattice, double t,
                                          DerivativePolicy policy, const char* name) {
  ComplexDerivativeSample out;
  if (analytic) {
    out.values.resize(static_cast<std::size_t>(lattice.n_sites()));
    for (int j = 0; j < lattice.n_sites(); ++j)
      out.values[static_cast<std::size_t>(j)] = analytic(lattice.position(j), t);
    return out;
  }
  if (policy == DerivativePolicy::AnalyticOnly) missing_derivative(name);
  out.values = central_difference<Complex>(field, lattice, t);
  out.used_fallback = true;
  return out;
}

}  // namespace sdqw
