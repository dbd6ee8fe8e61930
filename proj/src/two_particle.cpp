#include "sdqw/two_particle.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace sdqw {

namespace {

void require_dense_size(int n) {
  if (n > kMaxDenseTwoParticleSites)
    throw ValidationError("dense two-particle operators are limited to " +
                          std::to_string(kMaxDenseTwoParticleSites) + " sites per particle, got " +
                          std::to_string(n));
}

void require_state_size(const CVector& v, int n) {
  if (v.size() != 4 * static_cast<Eigen::Index>(n) * n)
    throw ValidationError("two-particle state has " + std::to_string(v.size()) +
                          " entries, expected 4 N^2 with N = " + std::to_string(n));
}

// exp(-i angle sigma_1 (x) sigma_1) maps coin c to 3 - c.
void apply_pair_coin(const RMatrix& angle, double sign, int n, CVector& v) {
  const Eigen::Index plane = static_cast<Eigen::Index>(n) * n;
  Complex* p0 = v.data();
  Complex* p1 = p0 + plane;
  Complex* p2 = p1 + plane;
  Complex* p3 = p2 + plane;
  for (int j1 = 0; j1 < n; ++j1) {
    for (int j2 = 0; j2 < n; ++j2) {
      const double th = sign * angle(j1, j2);
      const double c = std::cos(th);
      const Complex s = Complex(0.0, -std::sin(th));
      const Eigen::Index k = static_cast<Eigen::Index>(j1) * n + j2;
      const Complex a0 = p0[k], a1 = p1[k], a2 = p2[k], a3 = p3[k];
      p0[k] = c * a0 + s * a3;
      p1[k] = c * a1 + s * a2;
      p2[k] = c * a2 + s * a1;
      p3[k] = c * a3 + s * a0;
    }
  }
}

// Moves the plane of coin (c1, c2) by step sites along particle 1 or 2.
void move_plane(Complex* plane, int n, int particle, int step) {
  if (particle == 1) {
    const std::ptrdiff_t row = n;
    const std::ptrdiff_t total = row * n;
    if (step > 0)
      std::rotate(plane, plane + total - row, plane + total);
    else
      std::rotate(plane, plane + row, plane + total);
  } else {
    for (int j1 = 0; j1 < n; ++j1) {
      Complex* r = plane + static_cast<std::ptrdiff_t>(j1) * n;
      if (step > 0)
        std::rotate(r, r + n - 1, r + n);
      else
        std::rotate(r, r + 1, r + n);
    }
  }
}

// S+ moves coin 0 of each particle by +a, S- moves coin 1 by -a. inverse undoes the move.
void apply_pair_shift(ShiftDirection d, bool inverse, int n, CVector& v) {
  const int moving = d == ShiftDirection::Plus ? 0 : 1;
  int step = d == ShiftDirection::Plus ? 1 : -1;
  if (inverse) step = -step;
  const Eigen::Index plane = static_cast<Eigen::Index>(n) * n;
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2) {
      Complex* p = v.data() + (c1 * 2 + c2) * plane;
      if (c1 == moving) move_plane(p, n, 1, step);
      if (c2 == moving) move_plane(p, n, 2, step);
    }
}

RMatrix sample_pair(const PairField& f, const Lattice& lat, double t) {
  const int n = lat.n_sites();
  RMatrix out(n, n);
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) out(j1, j2) = f(lat.position(j1), lat.position(j2), t);
  return out;
}

void require_finite(const RMatrix& m, const Lattice& lat, double t, const char* what, int label) {
  const int n = lat.n_sites();
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2)
      if (!std::isfinite(m(j1, j2))) {
        std::ostringstream os;
        os << "coin " << label << " " << what << " is not finite at site pair (" << j1 << ", " << j2
           << "), x1=" << lat.position(j1) << ", x2=" << lat.position(j2) << ", t=" << t;
        throw DomainError(os.str(), j1 * n + j2, lat.position(j1), t);
      }
}

struct PairDerivative {
  RMatrix values;
  bool used_fallback = false;
};

PairDerivative pair_derivative(const PairField& f, const PairField& analytic, int axis,
                               const Lattice& lat, double t, DerivativePolicy policy,
                               const char* name, int label) {
  if (analytic) return {sample_pair(analytic, lat, t), false};
  if (policy == DerivativePolicy::AnalyticOnly)
    throw ValidationError("coin " + std::to_string(label) + ": analytic " + name + " required");
  const RMatrix v = sample_pair(f, lat, t);
  const int n = lat.n_sites();
  const double inv = 1.0 / (2.0 * lat.spacing());
  RMatrix d(n, n);
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) {
      if (axis == 1)
        d(j1, j2) = (v(lat.wrap(j1 + 1), j2) - v(lat.wrap(j1 - 1), j2)) * inv;
      else
        d(j1, j2) = (v(j1, lat.wrap(j2 + 1)) - v(j1, lat.wrap(j2 - 1))) * inv;
    }
  return {d, true};
}

// out = p_k applied along particle k's axis for every coin plane.
void apply_momentum(const MomentumOperator& p, int particle, int n, const Complex* in, Complex* out) {
  if (particle == 2) {
    for (int j1 = 0; j1 < n; ++j1) p.apply(in + static_cast<std::ptrdiff_t>(j1) * n, out + static_cast<std::ptrdiff_t>(j1) * n);
    return;
  }
  std::vector<Complex> col(static_cast<std::size_t>(n)), res(static_cast<std::size_t>(n));
  for (int j2 = 0; j2 < n; ++j2) {
    for (int j1 = 0; j1 < n; ++j1) col[static_cast<std::size_t>(j1)] = in[static_cast<std::ptrdiff_t>(j1) * n + j2];
    p.apply(col.data(), res.data());
    for (int j1 = 0; j1 < n; ++j1) out[static_cast<std::ptrdiff_t>(j1) * n + j2] = res[static_cast<std::size_t>(j1)];
  }
}

// c/2 {Theta, p_k} phi on one plane, added to out.
void add_symmetrized(const RMatrix& theta, const MomentumOperator& p, int particle, int n,
                     const Complex* phi, Complex* out) {
  const Eigen::Index plane = static_cast<Eigen::Index>(n) * n;
  std::vector<Complex> tmp(static_cast<std::size_t>(plane)), res(static_cast<std::size_t>(plane));
  apply_momentum(p, particle, n, phi, res.data());
  for (Eigen::Index k = 0; k < plane; ++k) out[k] += 0.5 * kLightSpeed * theta(k / n, k % n) * res[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 0; k < plane; ++k) tmp[static_cast<std::size_t>(k)] = theta(k / n, k % n) * phi[k];
  apply_momentum(p, particle, n, tmp.data(), res.data());
  for (Eigen::Index k = 0; k < plane; ++k) out[k] += 0.5 * kLightSpeed * res[static_cast<std::size_t>(k)];
}

Eigen::Matrix4cd coin_pauli(int r1, int r2) {
  Eigen::Matrix4cd m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) m(a * 2 + c, b * 2 + d) = pauli(r1)(a, b) * pauli(r2)(c, d);
  return m;
}

struct Channel {
  int r1, r2;
  const CMatrix* xi;      // complex grid or null
  const RMatrix* xi_real; // real grid or null
  const RMatrix* theta;   // may be null
  int particle;           // momentum the theta grid multiplies
};

std::vector<Channel> channels_of(const TwoParticleCoefficients& c) {
  return {{0, 3, &c.xi03, nullptr, &c.theta03_p2, 2},
          {3, 0, &c.xi30, nullptr, &c.theta30_p1, 1},
          {1, 2, &c.xi12, nullptr, &c.theta12_p2, 2},
          {2, 1, &c.xi21, nullptr, &c.theta21_p1, 1},
          {1, 1, nullptr, &c.xi11, nullptr, 0}};
}

}  // namespace

TwoParticleState::TwoParticleState(Lattice lattice, CVector amplitudes)
    : lattice_(std::move(lattice)), amp_(std::move(amplitudes)) {
  require_state_size(amp_, lattice_.n_sites());
  const double norm = amp_.squaredNorm();
  if (std::abs(norm - 1.0) > kTwoParticleNormTolerance)
    throw ValidationError("two-particle state is not normalized (norm^2 = " + std::to_string(norm) + ")");
}

Complex TwoParticleState::amplitude(int c1, int c2, int j1, int j2) const {
  return amp_[pair_index(c1, c2, j1, j2, lattice_.n_sites())];
}

TwoParticleState product_state(std::span<const Complex> coin1, int site1,
                               std::span<const Complex> coin2, int site2, const Lattice& lattice) {
  if (coin1.size() != 2 || coin2.size() != 2) throw ValidationError("each particle needs a 2-dim coin state");
  const int n = lattice.n_sites();
  if (site1 < 0 || site1 >= n || site2 < 0 || site2 >= n) throw ValidationError("initial site out of range");
  CVector amp = CVector::Zero(4 * static_cast<Eigen::Index>(n) * n);
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2) amp[pair_index(c1, c2, site1, site2, n)] = coin1[c1] * coin2[c2];
  return TwoParticleState(lattice, amp);
}

RMatrix sample_pair_angles(const TwoCoinField& field, const Lattice& lattice, double t, double tau) {
  RMatrix a = sample_pair(field.theta, lattice, t);
  if (tau != 0.0) a += tau * sample_pair(field.vartheta, lattice, t);
  require_finite(a, lattice, t, "angle", field.label);
  return a;
}

LinearOperator build_two_coin(const TwoCoinField& field, double t, double tau, const Lattice& lattice) {
  const int n = lattice.n_sites();
  require_dense_size(n);
  const RMatrix a = sample_pair_angles(field, lattice, t, tau);
  const Eigen::Index dim = 4 * static_cast<Eigen::Index>(n) * n;
  LinearOperator out;
  out.coin_dim = 4;
  out.n_sites = n * n;
  out.matrix = CMatrix::Zero(dim, dim);
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2)
      for (int c = 0; c < 4; ++c) {
        const Eigen::Index row = pair_index(c / 2, c % 2, j1, j2, n);
        const Eigen::Index col = pair_index((3 - c) / 2, (3 - c) % 2, j1, j2, n);
        out.matrix(row, row) = std::cos(a(j1, j2));
        out.matrix(row, col) = Complex(0.0, -std::sin(a(j1, j2)));
      }
  return out;
}

LinearOperator build_two_shift(const Lattice& lattice, ShiftDirection direction) {
  const int n = lattice.n_sites();
  require_dense_size(n);
  const Eigen::Index dim = 4 * static_cast<Eigen::Index>(n) * n;
  LinearOperator out;
  out.coin_dim = 4;
  out.n_sites = n * n;
  out.matrix = CMatrix::Zero(dim, dim);
  CVector e = CVector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    e[i] = 1.0;
    apply_pair_shift(direction, false, n, e);
    Eigen::Index row = 0;
    e.cwiseAbs().maxCoeff(&row);
    out.matrix(row, i) = 1.0;
    e[row] = 0.0;
  }
  return out;
}

LinearOperator two_particle_step(const TwoCoinField& coin1, const TwoCoinField& coin2, double t,
                                 double tau, const Lattice& lattice, StepMode mode) {
  require_dense_size(lattice.n_sites());
  const CMatrix c1 = build_two_coin(coin1, t, tau, lattice).matrix;
  const CMatrix c2 = build_two_coin(coin2, t, tau, lattice).matrix;
  const CMatrix sp = build_two_shift(lattice, ShiftDirection::Plus).matrix;
  const CMatrix sm = build_two_shift(lattice, ShiftDirection::Minus).matrix;
  LinearOperator out;
  out.coin_dim = 4;
  out.n_sites = lattice.n_sites() * lattice.n_sites();
  out.matrix = sp * c2 * sm * c1;
  if (mode == StepMode::Modified) {
    const CMatrix z1 = build_two_coin(coin1, t, 0.0, lattice).matrix;
    const CMatrix z2 = build_two_coin(coin2, t, 0.0, lattice).matrix;
    out.matrix = z1.adjoint() * z2.adjoint() * out.matrix;
  }
  return out;
}

TwoParticleKernel::TwoParticleKernel(const TwoCoinField& coin1, const TwoCoinField& coin2,
                                     const Lattice& lattice, double t, double tau, StepMode mode)
    : n_(lattice.n_sites()), modified_(mode == StepMode::Modified) {
  a1_ = sample_pair_angles(coin1, lattice, t, tau);
  a2_ = sample_pair_angles(coin2, lattice, t, tau);
  if (modified_) {
    a1_zero_ = sample_pair_angles(coin1, lattice, t, 0.0);
    a2_zero_ = sample_pair_angles(coin2, lattice, t, 0.0);
  }
}

void TwoParticleKernel::apply(CVector& v) const {
  require_state_size(v, n_);
  apply_pair_coin(a1_, 1.0, n_, v);
  apply_pair_shift(ShiftDirection::Minus, false, n_, v);
  apply_pair_coin(a2_, 1.0, n_, v);
  apply_pair_shift(ShiftDirection::Plus, false, n_, v);
  if (modified_) {
    apply_pair_coin(a2_zero_, -1.0, n_, v);
    apply_pair_coin(a1_zero_, -1.0, n_, v);
  }
}

void TwoParticleKernel::apply_adjoint(CVector& v) const {
  require_state_size(v, n_);
  if (modified_) {
    apply_pair_coin(a1_zero_, 1.0, n_, v);
    apply_pair_coin(a2_zero_, 1.0, n_, v);
  }
  apply_pair_shift(ShiftDirection::Plus, true, n_, v);
  apply_pair_coin(a2_, -1.0, n_, v);
  apply_pair_shift(ShiftDirection::Minus, true, n_, v);
  apply_pair_coin(a1_, -1.0, n_, v);
}

CVector exchange(const CVector& psi, int n) {
  require_state_size(psi, n);
  CVector out(psi.size());
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2)
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2)
          out[pair_index(c2, c1, j2, j1, n)] = psi[pair_index(c1, c2, j1, j2, n)];
  return out;
}

CMatrix exchange_matrix(int n) {
  require_dense_size(n);
  const Eigen::Index dim = 4 * static_cast<Eigen::Index>(n) * n;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2)
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) m(pair_index(c2, c1, j2, j1, n), pair_index(c1, c2, j1, j2, n)) = 1.0;
  return m;
}

double entanglement_entropy(const CVector& psi, int n) {
  require_state_size(psi, n);
  CMatrix m(2 * n, 2 * n);
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2)
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) m(c1 * n + j1, c2 * n + j2) = psi[pair_index(c1, c2, j1, j2, n)];
  const Eigen::BDCSVD<CMatrix> svd(m);
  const RVector s = svd.singularValues();
  const double total = s.squaredNorm();
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double p = s[i] * s[i] / total;
    if (p > 1e-300) entropy -= p * std::log(p);
  }
  return entropy;
}

RMatrix joint_probability(const CVector& psi, int n) {
  require_state_size(psi, n);
  RMatrix p = RMatrix::Zero(n, n);
  for (int c = 0; c < 4; ++c)
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) p(j1, j2) += std::norm(psi[pair_index(c / 2, c % 2, j1, j2, n)]);
  return p;
}

void write_joint_probability_csv(std::ostream& out, const Lattice& lattice,
                                 std::span<const JointFrame> frames) {
  out << "step,site1,site2,x1,x2,p\n";
  char buf[160];
  const int n = lattice.n_sites();
  for (const JointFrame& f : frames) {
    if (f.probability.rows() != n || f.probability.cols() != n)
      throw ValidationError("joint probability frame does not match the lattice");
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g\n", f.step, j1, j2,
                      lattice.position(j1), lattice.position(j2), f.probability(j1, j2));
        out << buf;
      }
  }
}

TwoParticleCoefficients TwoParticleCoefficients::zeros(int n) {
  TwoParticleCoefficients c;
  c.xi03 = c.xi30 = c.xi12 = c.xi21 = CMatrix::Zero(n, n);
  c.xi11 = c.theta03_p2 = c.theta30_p1 = c.theta12_p2 = c.theta21_p1 = RMatrix::Zero(n, n);
  return c;
}

TwoParticleCoefficients two_coefficients(const TwoCoinField& coin1, const TwoCoinField& coin2,
                                         double t, const Lattice& lattice, DerivativePolicy policy) {
  const int n = lattice.n_sites();
  const RMatrix th1 = sample_pair(coin1.theta, lattice, t);
  const RMatrix th2 = sample_pair(coin2.theta, lattice, t);
  const RMatrix v1 = sample_pair(coin1.vartheta, lattice, t);
  const RMatrix v2 = sample_pair(coin2.vartheta, lattice, t);
  require_finite(th1, lattice, t, "angle", coin1.label);
  require_finite(th2, lattice, t, "angle", coin2.label);
  const auto d11 = pair_derivative(coin1.theta, coin1.dtheta_dx1, 1, lattice, t, policy, "dtheta/dx1", coin1.label);
  const auto d12 = pair_derivative(coin1.theta, coin1.dtheta_dx2, 2, lattice, t, policy, "dtheta/dx2", coin1.label);
  const auto d21 = pair_derivative(coin2.theta, coin2.dtheta_dx1, 1, lattice, t, policy, "dtheta/dx1", coin2.label);
  const auto d22 = pair_derivative(coin2.theta, coin2.dtheta_dx2, 2, lattice, t, policy, "dtheta/dx2", coin2.label);
  require_finite(d11.values, lattice, t, "dtheta/dx1", coin1.label);
  require_finite(d12.values, lattice, t, "dtheta/dx2", coin1.label);
  require_finite(d21.values, lattice, t, "dtheta/dx1", coin2.label);
  require_finite(d22.values, lattice, t, "dtheta/dx2", coin2.label);

  TwoParticleCoefficients c = TwoParticleCoefficients::zeros(n);
  c.used_fallback = d11.used_fallback || d12.used_fallback || d21.used_fallback || d22.used_fallback;
  const Complex ihc = kI * kHbar * kLightSpeed;
  for (int j1 = 0; j1 < n; ++j1) {
    for (int j2 = 0; j2 < n; ++j2) {
      const double a = 2.0 * th1(j1, j2) + th2(j1, j2);
      const double b = 2.0 * th1(j1, j2) + 2.0 * th2(j1, j2);
      const double c2 = std::cos(th2(j1, j2));
      c.theta03_p2(j1, j2) = c.theta30_p1(j1, j2) = c2 * std::cos(a);
      c.theta12_p2(j1, j2) = c.theta21_p1(j1, j2) = c2 * std::sin(a);
      c.xi03(j1, j2) = ihc * (0.5 * std::sin(b) * d22.values(j1, j2) + c2 * std::sin(a) * d12.values(j1, j2));
      c.xi30(j1, j2) = ihc * (0.5 * std::sin(b) * d21.values(j1, j2) + c2 * std::sin(a) * d11.values(j1, j2));
      c.xi12(j1, j2) = -ihc * (0.5 * std::cos(b) * d22.values(j1, j2) + c2 * std::cos(a) * d12.values(j1, j2));
      c.xi21(j1, j2) = -ihc * (0.5 * std::cos(b) * d21.values(j1, j2) + c2 * std::cos(a) * d11.values(j1, j2));
      c.xi11(j1, j2) = -0.5 * kHbar * kLightSpeed * (d21.values(j1, j2) + d22.values(j1, j2)) +
                       kHbar * (v1(j1, j2) + v2(j1, j2));
    }
  }
  return c;
}

CVector apply_two_hamiltonian(const TwoParticleCoefficients& coefficients, const MomentumOperator& p,
                              const CVector& psi) {
  const int n = static_cast<int>(coefficients.xi11.rows());
  require_state_size(psi, n);
  const Eigen::Index plane = static_cast<Eigen::Index>(n) * n;
  CVector out = CVector::Zero(psi.size());
  CVector local(plane);
  for (const Channel& ch : channels_of(coefficients)) {
    const Eigen::Matrix4cd m = coin_pauli(ch.r1, ch.r2);
    for (int src = 0; src < 4; ++src) {
      const Complex* phi = psi.data() + src * plane;
      for (Eigen::Index k = 0; k < plane; ++k) {
        const double re = ch.xi ? (*ch.xi)(k / n, k % n).real() : (*ch.xi_real)(k / n, k % n);
        local[k] = re * phi[k];
      }
      if (ch.theta) add_symmetrized(*ch.theta, p, ch.particle, n, phi, local.data());
      for (int dst = 0; dst < 4; ++dst)
        if (m(dst, src) != 0.0) out.segment(dst * plane, plane) += m(dst, src) * local;
    }
  }
  return out;
}

CMatrix assemble_two_hamiltonian(const TwoParticleCoefficients& coefficients, const Lattice& lattice) {
  const int n = lattice.n_sites();
  require_dense_size(n);
  const MomentumOperator p(lattice);
  const Eigen::Index dim = 4 * static_cast<Eigen::Index>(n) * n;
  CMatrix h(dim, dim);
  CVector e = CVector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    e[i] = 1.0;
    h.col(i) = apply_two_hamiltonian(coefficients, p, e);
    e[i] = 0.0;
  }
  return h;
}

TwoHamiltonianSplit hamiltonian_split(const TwoParticleCoefficients& c) {
  const int n = static_cast<int>(c.xi11.rows());
  TwoHamiltonianSplit s{TwoParticleCoefficients::zeros(n), TwoParticleCoefficients::zeros(n),
                        TwoParticleCoefficients::zeros(n)};
  s.first.xi30 = c.xi30;
  s.first.theta30_p1 = c.theta30_p1;
  s.second.xi03 = c.xi03;
  s.second.theta03_p2 = c.theta03_p2;
  s.interaction.xi12 = c.xi12;
  s.interaction.theta12_p2 = c.theta12_p2;
  s.interaction.xi21 = c.xi21;
  s.interaction.theta21_p1 = c.theta21_p1;
  s.interaction.xi11 = c.xi11;
  s.first.used_fallback = s.second.used_fallback = s.interaction.used_fallback = c.used_fallback;
  return s;
}

CVector apply_two_numeric_generator(const TwoParticleKernel& kernel, double tau, const CVector& psi) {
  CVector u = psi;
  kernel.apply(u);
  return (kI / tau) * (u - psi);
}

CVector apply_two_numeric_generator_adjoint(const TwoParticleKernel& kernel, double tau,
                                            const CVector& psi) {
  CVector u = psi;
  kernel.apply_adjoint(u);
  return (-kI / tau) * (u - psi);
}

CVector channel_projection(const TwoParticleKernel& kernel, double tau, int r1, int r2,
                           const CVector& phi) {
  const int n = kernel.n_sites();
  const Eigen::Index plane = static_cast<Eigen::Index>(n) * n;
  if (phi.size() != plane) throw ValidationError("position vector must have N^2 entries");
  const Eigen::Matrix4cd m = coin_pauli(r1, r2);
  CVector out = CVector::Zero(plane);
  CVector e = CVector::Zero(4 * plane);
  for (int src = 0; src < 4; ++src) {
    e.setZero();
    e.segment(src * plane, plane) = phi;
    const CVector h = apply_two_numeric_generator(kernel, tau, e);
    for (int dst = 0; dst < 4; ++dst)
      if (m(src, dst) != 0.0) out += 0.25 * m(src, dst) * h.segment(dst * plane, plane);
  }
  return out;
}

std::vector<CVector> two_particle_position_bank(const Lattice& lattice) {
  struct Packet {
    double x1, x2, width, k1, k2;
  };
  static const Packet packets[] = {{0.0, 0.1, 0.1, 3.0, -2.0}, {0.05, -0.05, 0.12, 0.0, 2.0}};
  const int n = lattice.n_sites();
  const double window = n * lattice.spacing();
  auto commensurate = [&](double k) {
    return 2.0 * std::numbers::pi * std::round(k * window / (2.0 * std::numbers::pi)) / window;
  };
  std::vector<CVector> out;
  for (const Packet& pk : packets) {
    const double k1 = commensurate(pk.k1), k2 = commensurate(pk.k2);
    CVector g(static_cast<Eigen::Index>(n) * n);
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) {
        const double x1 = lattice.position(j1), x2 = lattice.position(j2);
        const double r2 = (x1 - pk.x1) * (x1 - pk.x1) + (x2 - pk.x2) * (x2 - pk.x2);
        g[static_cast<Eigen::Index>(j1) * n + j2] =
            std::exp(-r2 / (4.0 * pk.width * pk.width)) * std::polar(1.0, k1 * x1 + k2 * x2);
      }
    g.normalize();
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<CVector> two_particle_test_bank(const Lattice& lattice) {
  std::vector<Eigen::Vector4cd> coins(3, Eigen::Vector4cd::Zero());
  coins[0][0] = 1.0;
  coins[1][3] = 1.0;
  coins[2] << 1.0, kI, -1.0, 0.5;
  coins[2].normalize();
  const Eigen::Index plane = static_cast<Eigen::Index>(lattice.n_sites()) * lattice.n_sites();
  std::vector<CVector> bank;
  for (const CVector& g : two_particle_position_bank(lattice))
    for (const auto& c : coins) {
      CVector psi(4 * plane);
      for (int k = 0; k < 4; ++k) psi.segment(k * plane, plane) = c[k] * g;
      bank.push_back(std::move(psi));
    }
  return bank;
}

ConvergenceReport two_particle_convergence_order(const TwoFieldFactory& fields,
                                                 std::span<const double> L_list,
                                                 const ConvergenceWindow& window) {
  auto measure = [&](double L) {
    const Lattice lat = make_lattice(window_sites(L, window.half_width), 1.0 / L);
    const TwoFieldPair f = fields(lat);
    const double tau = lat.spacing() / kLightSpeed;
    const TwoParticleKernel kernel(f.coin1, f.coin2, lat, window.t, tau);
    const auto coeffs = two_coefficients(f.coin1, f.coin2, window.t, lat);
    const MomentumOperator p(lat);
    ConvergenceRow row{L, 0.0, 0.0};
    for (const auto& psi : two_particle_test_bank(lat)) {
      const CVector hn = apply_two_numeric_generator(kernel, tau, psi);
      const CVector hn_dag = apply_two_numeric_generator_adjoint(kernel, tau, psi);
      const CVector ha = apply_two_hamiltonian(coeffs, p, psi);
      row.error = std::max(row.error, (hn - ha).norm());
      row.hermiticity_defect = std::max(row.hermiticity_defect, (hn - hn_dag).norm());
    }
    return row;
  };
  return convergence_order(measure, L_list);
}

}  // namespace sdqw
