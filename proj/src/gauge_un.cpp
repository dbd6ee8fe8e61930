#include "sdqw/gauge_un.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace sdqw {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

std::vector<double> weights_at(const GaugeWeight& w, int count, double x, double t) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int q = 0; q < count; ++q) out[static_cast<std::size_t>(q)] = w(q, x, t);
  return out;
}

void require_weights(const GaugeCoinField& field) {
  if (!field.omega || !field.Omega) throw ValidationError("gauge coin needs both omega and Omega");
}

}  // namespace

GeneratorSet make_generators(int N) {
  if (N < 1) throw ValidationError("U(N) needs N >= 1, got " + std::to_string(N));
  GeneratorSet g;
  g.N = N;
  g.matrices.push_back(CMatrix::Identity(N, N));
  for (int j = 0; j < N; ++j) {
    for (int k = j + 1; k < N; ++k) {
      CMatrix s = CMatrix::Zero(N, N);
      s(j, k) = s(k, j) = 1.0;
      g.matrices.push_back(s);
      CMatrix a = CMatrix::Zero(N, N);
      a(j, k) = -kI;
      a(k, j) = kI;
      g.matrices.push_back(a);
    }
  }
  for (int l = 1; l < N; ++l) {
    CMatrix d = CMatrix::Zero(N, N);
    const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) d(j, j) = norm;
    d(l, l) = -l * norm;
    g.matrices.push_back(d);
  }
  return g;
}

CMatrix gauge_exponential(const GeneratorSet& generators, std::span<const double> weights,
                          double tau) {
  if (static_cast<int>(weights.size()) != generators.size())
    throw ValidationError("expected one weight per generator");
  if (tau == 0.0) return CMatrix::Identity(generators.N, generators.N);
  CMatrix h = CMatrix::Zero(generators.N, generators.N);
  for (int q = 0; q < generators.size(); ++q)
    h += weights[static_cast<std::size_t>(q)] * generators.matrices[q];
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phases(generators.N);
  for (int i = 0; i < generators.N; ++i) phases[i] = std::polar(1.0, -tau * es.eigenvalues()[i]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix sample_gauge_coin(const GaugeCoinField& field, const GeneratorSet& generators, double x,
                          double t, double tau) {
  require_weights(field);
  const int N = generators.N;
  const Eigen::Matrix2cd c = sample_coin(field.base, x, t, tau);
  CMatrix gauge = CMatrix::Zero(2 * N, 2 * N);
  const auto w = weights_at(field.omega, generators.size(), x, t);
  const auto W = weights_at(field.Omega, generators.size(), x, t);
  gauge.topLeftCorner(N, N) = gauge_exponential(generators, w, tau);
  gauge.bottomRightCorner(N, N) = gauge_exponential(generators, W, tau);
  return kron(CMatrix(c), CMatrix::Identity(N, N)) * gauge;
}

std::vector<CMatrix> sample_gauge_coins(const GaugeCoinField& field, const GeneratorSet& generators,
                                        const Lattice& lattice, double t, double tau) {
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(lattice.n_sites()));
  for (int j = 0; j < lattice.n_sites(); ++j) {
    try {
      out.push_back(sample_gauge_coin(field, generators, lattice.position(j), t, tau));
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at site " + std::to_string(j), j,
                        lattice.position(j), t);
    }
  }
  return out;
}

LinearOperator build_coin_un(const GaugeCoinField& field, const GeneratorSet& generators, double t,
                             double tau, const Lattice& lattice) {
  const auto blocks = sample_gauge_coins(field, generators, lattice, t, tau);
  LinearOperator out;
  out.coin_dim = 2 * generators.N;
  out.n_sites = lattice.n_sites();
  out.matrix = coin_blocks_to_matrix(blocks, out.coin_dim);
  return out;
}

LinearOperator gauge_step_operator(const GaugeStepBuilder& builder, double t, double tau) {
  const Lattice& lat = builder.lattice;
  const int d = 2 * builder.generators.N;
  const CMatrix c1 = build_coin_un(builder.coin1, builder.generators, t, tau, lat).matrix;
  const CMatrix c2 = build_coin_un(builder.coin2, builder.generators, t, tau, lat).matrix;
  const CMatrix sp = build_shift(lat, ShiftDirection::Plus, d).matrix;
  const CMatrix sm = build_shift(lat, ShiftDirection::Minus, d).matrix;
  LinearOperator out;
  out.coin_dim = d;
  out.n_sites = lat.n_sites();
  out.matrix = sp * c2 * sm * c1;
  if (builder.mode == StepMode::Modified) {
    const CMatrix z1 = build_coin_un(builder.coin1, builder.generators, t, 0.0, lat).matrix;
    const CMatrix z2 = build_coin_un(builder.coin2, builder.generators, t, 0.0, lat).matrix;
    out.matrix = z1.adjoint() * z2.adjoint() * out.matrix;
  }
  return out;
}

GaugeStepKernel::GaugeStepKernel(const GaugeStepBuilder& builder, double t, double tau)
    : n_sites_(builder.lattice.n_sites()),
      coin_dim_(2 * builder.generators.N),
      modified_(builder.mode == StepMode::Modified) {
  const Lattice& lat = builder.lattice;
  c1_ = sample_gauge_coins(builder.coin1, builder.generators, lat, t, tau);
  c2_ = sample_gauge_coins(builder.coin2, builder.generators, lat, t, tau);
  if (modified_) {
    c1_zero_ = sample_gauge_coins(builder.coin1, builder.generators, lat, t, 0.0);
    c2_zero_ = sample_gauge_coins(builder.coin2, builder.generators, lat, t, 0.0);
  }
}

void GaugeStepKernel::apply(CVector& v) const {
  apply_site_blocks(c1_, coin_dim_, v);
  apply_shift(ShiftDirection::Minus, coin_dim_, n_sites_, v);
  apply_site_blocks(c2_, coin_dim_, v);
  apply_shift(ShiftDirection::Plus, coin_dim_, n_sites_, v);
  if (modified_) {
    apply_site_blocks_adjoint(c2_zero_, coin_dim_, v);
    apply_site_blocks_adjoint(c1_zero_, coin_dim_, v);
  }
}

void GaugeStepKernel::apply_adjoint(CVector& v) const {
  if (modified_) {
    apply_site_blocks(c1_zero_, coin_dim_, v);
    apply_site_blocks(c2_zero_, coin_dim_, v);
  }
  apply_shift_adjoint(ShiftDirection::Plus, coin_dim_, n_sites_, v);
  apply_site_blocks_adjoint(c2_, coin_dim_, v);
  apply_shift_adjoint(ShiftDirection::Minus, coin_dim_, n_sites_, v);
  apply_site_blocks_adjoint(c1_, coin_dim_, v);
}

ChiGrids chi_coefficients(const GaugeCoinField& coin1, const GaugeCoinField& coin2, int N,
                          const Lattice& lattice, double t) {
  require_weights(coin1);
  require_weights(coin2);
  const int nq = N * N;
  const int n = lattice.n_sites();
  ChiGrids out;
  out.N = N;
  for (auto& r : out.chi) r.assign(static_cast<std::size_t>(nq), RVector::Zero(n));
  for (int j = 0; j < n; ++j) {
    const double x = lattice.position(j);
    // The global phase drops out of |F|^2 - |G|^2 and G F*.
    const Eigen::Matrix2cd c = sample_coin(coin1.base, x, t, 0.0);
    const double fg = std::norm(c(0, 0)) - std::norm(c(0, 1));
    const Complex gf = c(0, 1) * std::conj(c(0, 0));
    for (int q = 0; q < nq; ++q) {
      const double w1 = coin1.omega(q, x, t), W1 = coin1.Omega(q, x, t);
      const double w2 = coin2.omega(q, x, t), W2 = coin2.Omega(q, x, t);
      out.chi[0][q][j] = 0.5 * kHbar * (w1 + W1 + w2 + W2);
      out.chi[3][q][j] = 0.5 * kHbar * (w1 - W1 + (w2 - W2) * fg);
      out.chi[1][q][j] = kHbar * gf.real() * (w2 - W2);
      out.chi[2][q][j] = -kHbar * gf.imag() * (w2 - W2);
    }
  }
  return out;
}

CVector apply_gauge_hamiltonian(const HamiltonianCoefficients& base, const ChiGrids& chi,
                                const GeneratorSet& generators, const MomentumOperator& p,
                                const CVector& psi) {
  const int N = generators.N;
  const int d = 2 * N;
  const Eigen::Index n = base.xi[0].size();
  if (psi.size() != d * n) throw ValidationError("state size does not match the U(N) walk");
  if (chi.N != N) throw ValidationError("chi grids and generators disagree on N");
  CVector out = CVector::Zero(psi.size());

  // Spin part, acting on each colour separately.
  CVector sub(2 * n);
  for (int c = 0; c < N; ++c) {
    sub.head(n) = psi.segment(c * n, n);
    sub.tail(n) = psi.segment((N + c) * n, n);
    const CVector h = apply_hamiltonian(base, p, sub);
    out.segment(c * n, n) += h.head(n);
    out.segment((N + c) * n, n) += h.tail(n);
  }

  // Gauge part, local in position.
  std::array<std::vector<CMatrix>, 4> terms;
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < generators.size(); ++q)
      terms[r].push_back(kron(CMatrix(pauli(r)), generators.matrices[q]));
  CMatrix k(d, d);
  CVector local(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    k.setZero();
    for (int r = 0; r < 4; ++r)
      for (int q = 0; q < generators.size(); ++q) k += chi.chi[r][q][j] * terms[r][q];
    for (int c = 0; c < d; ++c) local[c] = psi[c * n + j];
    local = k * local;
    for (int c = 0; c < d; ++c) out[c * n + j] += local[c];
  }
  return out;
}

CMatrix assemble_gauge_hamiltonian(const HamiltonianCoefficients& base, const ChiGrids& chi,
                                   const GeneratorSet& generators, const Lattice& lattice) {
  const MomentumOperator p(lattice);
  const Eigen::Index dim = 2 * generators.N * lattice.n_sites();
  CMatrix h(dim, dim);
  CVector e = CVector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    e[i] = 1.0;
    h.col(i) = apply_gauge_hamiltonian(base, chi, generators, p, e);
    e[i] = 0.0;
  }
  return h;
}

CVector apply_gauge_numeric_generator(const GaugeStepKernel& kernel, double tau, const CVector& psi) {
  CVector u = psi;
  kernel.apply(u);
  return (kI / tau) * (u - psi);
}

CVector apply_gauge_numeric_generator_adjoint(const GaugeStepKernel& kernel, double tau,
                                              const CVector& psi) {
  CVector u = psi;
  kernel.apply_adjoint(u);
  return (-kI / tau) * (u - psi);
}

std::vector<CVector> gauge_test_bank(const Lattice& lattice, int N) {
  const int d = 2 * N;
  std::vector<CVector> coins(3, CVector::Zero(d));
  coins[0][0] = 1.0;
  coins[1][d - 1] = 1.0;
  for (int c = 0; c < d; ++c) coins[2][c] = std::polar(1.0 + 0.3 * c, 0.7 * c);
  coins[2].normalize();
  return gaussian_bank(lattice, coins);
}

ConvergenceReport gauge_convergence_order(const GaugeBuilderFactory& builder_for,
                                          std::span<const double> L_list,
                                          const ConvergenceWindow& window) {
  auto measure = [&](double L) {
    const Lattice lat = make_lattice(window_sites(L, window.half_width), 1.0 / L);
    const GaugeStepBuilder b = builder_for(lat);
    const double tau = lat.spacing() / kLightSpeed;
    const GaugeStepKernel kernel(b, window.t, tau);
    const auto base = coefficients_for(b.base(), window.t);
    const auto chi = chi_coefficients(b.coin1, b.coin2, b.generators.N, lat, window.t);
    const MomentumOperator p(lat);
    ConvergenceRow row{L, 0.0, 0.0};
    for (const auto& psi : gauge_test_bank(lat, b.generators.N)) {
      const CVector hn = apply_gauge_numeric_generator(kernel, tau, psi);
      const CVector hn_dag = apply_gauge_numeric_generator_adjoint(kernel, tau, psi);
      const CVector ha = apply_gauge_hamiltonian(base, chi, b.generators, p, psi);
      row.error = std::max(row.error, (hn - ha).norm());
      row.hermiticity_defect = std::max(row.hermiticity_defect, (hn - hn_dag).norm());
    }
    return row;
  };
  return convergence_order(measure, L_list);
}

}  // namespace sdqw
