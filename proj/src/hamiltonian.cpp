#include "sdqw/hamiltonian.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sdqw {

namespace {

Complex cj(Complex z) { return std::conj(z); }
double re(Complex z) { return z.real(); }
double im(Complex z) { return z.imag(); }
double n2(Complex z) { return std::norm(z); }

constexpr double hb = kHbar;
constexpr double c = kLightSpeed;

}  // namespace

CoinJet RestrictedJet::to_general() const {
  CoinJet j;
  const double s = std::sin(theta), co = std::cos(theta);
  j.F = {co, 0.0};
  j.G = {0.0, -s};
  j.f = {-vartheta * s, 0.0};
  j.g = {0.0, -vartheta * co};
  j.dF = {-s * dtheta, 0.0};
  j.dG = {0.0, -co * dtheta};
  j.lambda = lambda;
  j.dxi = dxi;
  return j;
}

CoefficientPoint general_coefficients(const CoinJet& a, const CoinJet& b) {
  const Complex F1 = a.F, G1 = a.G, f1 = a.f, g1 = a.g, dF1 = a.dF, dG1 = a.dG;
  const Complex F2 = b.F, G2 = b.G, f2 = b.f, g2 = b.g, dF2 = b.dF, dG2 = b.dG;
  const double l1 = a.lambda, l2 = b.lambda, dxi1 = a.dxi, dxi2 = b.dxi;
  const double aF1 = n2(F1), aG1 = n2(G1), aF2 = n2(F2), aG2 = n2(G2);
  const Complex i = kI;

  CoefficientPoint out;

  out.xi[0] = -hb * (l1 + l2) + hb * c / 2 * im(cj(F2) * dF2 + cj(G2) * dG2) -
              hb * c * aF2 * im(F1 * cj(dF1) + G1 * cj(dG1)) -
              hb * c * im(cj(F1) * cj(F2) * G2 * cj(dG1) + F2 * G1 * cj(G2) * dF1) +
              hb * c / 2 * dxi2;

  out.xi[3] =
      -hb * im(cj(F1) * f1 + cj(g1) * G1 + cj(G2) * g2 + F2 * cj(f2)) -
      2 * hb * im(f2 * cj(F2) * aF1 - f2 * G1 * F1 * cj(G2) + cj(g2) * G2 * aF1 + cj(g2) * F2 * F1 * G1) +
      i * hb * c / 2.0 * dF2 * (2.0 * F1 * G1 * cj(G2) + cj(F2) * aG1 - aF1 * cj(F2)) +
      i * hb * c * aF2 * re(G1 * cj(dG1) - F1 * cj(dF1)) +
      i * hb * c / 2.0 * dG2 * (2.0 * cj(F2) * cj(F1) * cj(G1) + aF1 * cj(G2) - aG1 * cj(G2)) +
      i * hb * c * re(F2 * G1 * cj(G2) * dF1 + F1 * F2 * cj(G2) * dG1) +
      hb * c / 2 * dxi1 * (2 * aF2 * (aF1 - aG1) - 4 * re(F2 * F1 * G1 * cj(G2))) +
      hb * c / 2 * dxi2 * ((aG2 - aF2) * (aG1 - aF1) - 4 * re(F2 * F1 * G1 * cj(G2)));

  out.xi[1] =
      -hb * im(cj(g2) * F2 * G1 * G1 + cj(g2) * cj(F1) * G1 * G2 - cj(f2) * G2 * cj(F1) * cj(F1) -
               cj(f2) * G1 * F2 * cj(F1) + g2 * cj(F1) * cj(F1) * cj(F2) - g2 * cj(F1) * G1 * cj(G2) +
               f2 * G1 * cj(F1) * cj(F2) - f2 * G1 * G1 * cj(G2)) -
      i * hb * c * re(cj(F1) * aF2 * dG1 - cj(G2) * G1 * F2 * dG1 + cj(F1) * cj(F2) * G2 * cj(dF1) +
                      G1 * aF2 * cj(dF1)) -
      i * hb * c * re(cj(F1) * G1) * (cj(F2) * dF2 - cj(G2) * dG2) -
      i * hb * c / 2.0 * cj(G2) * dF2 * (F1 * F1 - G1 * G1) -
      i * hb * c / 2.0 * cj(F2) * dG2 * (cj(F1) * cj(F1) - cj(G1) * cj(G1)) +
      hb * c / 2 * dxi1 *
          (4 * aF2 * re(G1 * cj(F1)) - 2 * re(cj(G2) * F2 * G1 * G1) + 2 * re(G2 * cj(F2) * cj(F1) * cj(F1))) +
      hb * c / 2 * dxi2 *
          (2 * aF2 * re(G1 * cj(F1)) - 2 * aG2 * re(G1 * cj(F1)) + 2 * re(F1 * F1 * F2 * cj(G2)) -
           2 * re(F2 * cj(G2) * G1 * G1)) -
      hb * im(g1 * cj(F1) - cj(f1) * G1);

  out.xi[2] =
      i * hb * c * im(dG1 * (aF2 * cj(F1) - cj(G2) * G1 * F2)) +
      i * hb * c * im(cj(dF1) * (G2 * cj(F1) * cj(F2) + G1 * aF2)) +
      hb * c / 2.0 * dF2 * (2.0 * i * cj(F2) * im(cj(F1) * G1) - cj(G2) * F1 * F1 - cj(G2) * G1 * G1) +
      hb * c / 2.0 * dG2 * (-2.0 * i * cj(G2) * im(cj(F1) * G1) + cj(F2) * (cj(F1) * cj(F1) + cj(G1) * cj(G1))) -
      hb * re(g1 * cj(F1) - cj(f1) * G1 + cj(g2) * F2 * G1 * G1 + cj(g2) * cj(F1) * G1 * G2 -
              cj(f2) * G2 * cj(F1) * cj(F1) - cj(f2) * G1 * F2 * cj(F1) + g2 * cj(F2) * cj(F1) * cj(F1) -
              g2 * cj(F1) * G1 * cj(G2) + f2 * G1 * cj(F1) * cj(F2) - f2 * G1 * G1 * cj(G2)) -
      hb * c * dxi1 * (2 * aF2 * im(G1 * cj(F1)) + im(G2 * cj(F2) * cj(F1) * cj(F1) - cj(G2) * F2 * G1 * G1)) -
      hb * c * dxi2 * ((aF2 - aG2) * im(G1 * cj(F1)) + im(G2 * cj(F2) * cj(F1) * cj(F1) - F2 * cj(G2) * G1 * G1));

  const Complex w = 2.0 * aF2 * cj(G1) * F1 - cj(F2) * G2 * cj(G1) * cj(G1) + F2 * F1 * F1 * cj(G2);
  out.theta[0] = 0.0;
  out.theta[1] = re(w);
  out.theta[2] = im(w);
  out.theta[3] = -(aF2 * aG1 - aF2 * aF1 + 2 * re(F1 * F2 * G1 * cj(G2)));
  return out;
}

CoefficientPoint restricted_coefficients(const RestrictedJet& a, const RestrictedJet& b) {
  const double t1 = a.theta, t2 = b.theta, d1 = a.dtheta, d2 = b.dtheta;
  const Complex i = kI;
  CoefficientPoint out;
  out.theta[1] = 0.0;
  out.theta[2] = std::cos(t2) * std::sin(2 * t1 + t2);
  out.theta[3] = 0.5 * std::cos(2 * t1) + 0.5 * std::cos(2 * t1 + 2 * t2);
  out.xi[0] = -hb * (a.lambda + b.lambda) + hb * c / 2 * b.dxi;
  out.xi[1] = hb * (a.vartheta + b.vartheta) - hb * c / 2 * d2;
  out.xi[3] = i * hb * c / 2.0 * std::sin(2 * t1 + 2 * t2) * d2 +
              i * hb * c * std::cos(t2) * std::sin(t2 + 2 * t1) * d1 +
              hb * c / 2 * a.dxi * (std::cos(2 * t1) + std::cos(2 * t1 + 2 * t2)) +
              hb * c / 2 * b.dxi * std::cos(2 * t1 + 2 * t2);
  out.xi[2] = -i * hb * c * std::cos(t2) * std::cos(2 * t1 + t2) * d1 -
              i * hb * c / 2.0 * std::cos(2 * t1 + 2 * t2) * d2 +
              hb * c * a.dxi * std::cos(t2) * std::sin(2 * t1 + t2) +
              hb * c / 2 * b.dxi * std::sin(2 * t1 + 2 * t2);
  return out;
}

CoefficientPoint comparable_coefficients(const RestrictedJet& a, const RestrictedJet& b) {
  const double t1 = a.theta, d1 = a.dtheta;
  CoefficientPoint out;
  out.theta[3] = std::cos(2 * t1);
  out.xi[0] = -hb * (a.lambda + b.lambda) + hb * c / 2 * b.dxi;
  out.xi[1] = hb * (a.vartheta + b.vartheta) + hb * c * d1;
  out.xi[2] = -hb * c / 2 * std::sin(2 * t1) * b.dxi;
  out.xi[3] = kI * hb * c * std::sin(2 * t1) * d1 +
              hb * c / 2 * std::cos(2 * t1) * (2 * a.dxi + b.dxi);
  return out;
}

std::string to_string(CoefficientProvenance p) {
  switch (p) {
    case CoefficientProvenance::GeneralU2: return "general-u2";
    case CoefficientProvenance::Restricted: return "restricted";
    case CoefficientProvenance::RestrictedTheta2MinusTwoTheta1: return "restricted-theta2=-2theta1";
  }
  return "unknown";
}

namespace {

HamiltonianCoefficients empty_coefficients(int n) {
  HamiltonianCoefficients h;
  for (int r = 0; r < 4; ++r) {
    h.xi[static_cast<std::size_t>(r)] = CVector::Zero(n);
    h.theta[static_cast<std::size_t>(r)] = RVector::Zero(n);
  }
  return h;
}

void store(HamiltonianCoefficients& h, int j, const CoefficientPoint& p) {
  for (std::size_t r = 0; r < 4; ++r) {
    h.xi[r][j] = p.xi[r];
    h.theta[r][j] = p.theta[r];
  }
}

struct SampledCoin {
  std::vector<CoinJet> jets;
  bool used_fallback = false;
};

SampledCoin sample_jets(const CoinField& f, double t, const Lattice& lat, DerivativePolicy policy) {
  const auto dF = sample_derivative(f.F, f.dF, lat, t, policy, "dF");
  const auto dG = sample_derivative(f.G, f.dG, lat, t, policy, "dG");
  const auto dxi = sample_derivative(f.xi, f.dxi, lat, t, policy, "dxi");
  SampledCoin out;
  out.used_fallback = dF.used_fallback || dG.used_fallback || dxi.used_fallback;
  out.jets.resize(static_cast<std::size_t>(lat.n_sites()));
  for (int j = 0; j < lat.n_sites(); ++j) {
    const double x = lat.position(j);
    const auto k = static_cast<std::size_t>(j);
    CoinJet& jet = out.jets[k];
    jet.F = f.F(x, t);
    jet.G = f.G(x, t);
    jet.f = f.f(x, t);
    jet.g = f.g(x, t);
    jet.lambda = f.lambda(x, t);
    jet.dF = dF.values[k];
    jet.dG = dG.values[k];
    jet.dxi = dxi.values[k];
  }
  return out;
}

struct SampledRestricted {
  std::vector<RestrictedJet> jets;
  bool used_fallback = false;
};

SampledRestricted sample_jets(const RestrictedCoinField& f, double t, const Lattice& lat,
                              DerivativePolicy policy) {
  const auto dth = sample_derivative(f.theta, f.dtheta, lat, t, policy, "dtheta");
  const auto dxi = sample_derivative(f.xi, f.dxi, lat, t, policy, "dxi");
  SampledRestricted out;
  out.used_fallback = dth.used_fallback || dxi.used_fallback;
  out.jets.resize(static_cast<std::size_t>(lat.n_sites()));
  for (int j = 0; j < lat.n_sites(); ++j) {
    const double x = lat.position(j);
    const auto k = static_cast<std::size_t>(j);
    RestrictedJet& jet = out.jets[k];
    jet.theta = f.theta(x, t);
    jet.vartheta = f.vartheta(x, t);
    jet.lambda = f.lambda(x, t);
    jet.dtheta = dth.values[k];
    jet.dxi = dxi.values[k];
  }
  return out;
}

}  // namespace

HamiltonianCoefficients coefficients_general(const CoinField& coin1, const CoinField& coin2,
                                             double t, const Lattice& lattice,
                                             DerivativePolicy policy) {
  const auto s1 = sample_jets(coin1, t, lattice, policy);
  const auto s2 = sample_jets(coin2, t, lattice, policy);
  auto h = empty_coefficients(lattice.n_sites());
  h.provenance = CoefficientProvenance::GeneralU2;
  h.used_fallback = s1.used_fallback || s2.used_fallback;
  for (int j = 0; j < lattice.n_sites(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    store(h, j, general_coefficients(s1.jets[k], s2.jets[k]));
  }
  return h;
}

HamiltonianCoefficients coefficients_restricted(const RestrictedCoinField& coin1,
                                                const RestrictedCoinField& coin2, double t,
                                                const Lattice& lattice, DerivativePolicy policy) {
  const auto s1 = sample_jets(coin1, t, lattice, policy);
  const auto s2 = sample_jets(coin2, t, lattice, policy);
  bool comparable = true;
  for (std::size_t k = 0; k < s1.jets.size() && comparable; ++k)
    comparable = std::abs(s2.jets[k].theta + 2.0 * s1.jets[k].theta) <= kComparableTolerance;

  auto h = empty_coefficients(lattice.n_sites());
  h.provenance = comparable ? CoefficientProvenance::RestrictedTheta2MinusTwoTheta1
                            : CoefficientProvenance::Restricted;
  h.used_fallback = s1.used_fallback || s2.used_fallback;
  for (int j = 0; j < lattice.n_sites(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    store(h, j, comparable ? comparable_coefficients(s1.jets[k], s2.jets[k])
                           : restricted_coefficients(s1.jets[k], s2.jets[k]));
  }
  return h;
}

HamiltonianCoefficients coefficients_for(const StepBuilder& builder, double t,
                                         DerivativePolicy policy) {
  const auto* r1 = std::get_if<RestrictedCoinField>(&builder.coin1);
  const auto* r2 = std::get_if<RestrictedCoinField>(&builder.coin2);
  if (r1 && r2) return coefficients_restricted(*r1, *r2, t, builder.lattice, policy);
  const CoinField g1 = r1 ? r1->to_coin_field() : std::get<CoinField>(builder.coin1);
  const CoinField g2 = r2 ? r2->to_coin_field() : std::get<CoinField>(builder.coin2);
  return coefficients_general(g1, g2, t, builder.lattice, policy);
}

struct MomentumOperator::Impl {
  Eigen::FFT<double> fft;
  int n = 0;
  mutable std::vector<Complex> in, spec, out;
};

MomentumOperator::MomentumOperator(const Lattice& lattice) : impl_(std::make_unique<Impl>()) {
  const int n = lattice.n_sites();
  impl_->n = n;
  impl_->in.resize(static_cast<std::size_t>(n));
  impl_->spec.resize(static_cast<std::size_t>(n));
  impl_->out.resize(static_cast<std::size_t>(n));
  const double dk = 2.0 * std::numbers::pi * kHbar / (n * lattice.spacing());
  k_.resize(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    // FFT bin order; for even n the Nyquist bin is taken as +pi/a.
    const int s = (2 * m <= n) ? m : m - n;
    k_[static_cast<std::size_t>(m)] = s * dk;
  }
}

MomentumOperator::~MomentumOperator() = default;

void MomentumOperator::apply(const Complex* in, Complex* out) const {
  auto& im_ = *impl_;
  std::copy(in, in + im_.n, im_.in.begin());
  im_.fft.fwd(im_.spec, im_.in);
  for (int m = 0; m < im_.n; ++m) im_.spec[static_cast<std::size_t>(m)] *= k_[static_cast<std::size_t>(m)];
  im_.fft.inv(im_.out, im_.spec);
  std::copy(im_.out.begin(), im_.out.end(), out);
}

CMatrix MomentumOperator::matrix() const {
  const int n = impl_->n;
  CMatrix p(n, n);
  CVector e = CVector::Zero(n), col(n);
  for (int l = 0; l < n; ++l) {
    e.setZero();
    e[l] = 1.0;
    apply(e.data(), col.data());
    p.col(l) = col;
  }
  // Exact Hermitian symmetrization removes FFT round-off asymmetry.
  return 0.5 * (p + p.adjoint());
}

CMatrix assemble(const HamiltonianCoefficients& h, const Lattice& lattice) {
  const int n = lattice.n_sites();
  const MomentumOperator pop(lattice);
  const CMatrix P = pop.matrix();
  CMatrix H = CMatrix::Zero(2 * n, 2 * n);
  for (int r = 0; r < 4; ++r) {
    const auto k = static_cast<std::size_t>(r);
    CMatrix block = CMatrix::Zero(n, n);
    block.diagonal() = h.xi[k].real().cast<Complex>();
    if (r > 0) {
      const CVector th = h.theta[k].cast<Complex>();
      block += 0.5 * kLightSpeed * (th.asDiagonal() * P + P * th.asDiagonal());
    }
    const auto& s = pauli(r);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (s(a, b) != Complex(0.0)) H.block(a * n, b * n, n, n) += s(a, b) * block;
  }
  return H;
}

CVector apply_hamiltonian(const HamiltonianCoefficients& h, const MomentumOperator& p,
                          const CVector& psi) {
  const Eigen::Index n = psi.size() / 2;
  CVector out = CVector::Zero(psi.size());
  CVector tmp(n), ptmp(n);
  std::array<CVector, 2> comp{psi.head(n), psi.tail(n)};
  std::array<CVector, 2> pcomp{CVector(n), CVector(n)};
  for (int q = 0; q < 2; ++q) p.apply(comp[static_cast<std::size_t>(q)].data(), pcomp[static_cast<std::size_t>(q)].data());
  for (int r = 0; r < 4; ++r) {
    const auto k = static_cast<std::size_t>(r);
    std::array<CVector, 2> blk;
    for (std::size_t q = 0; q < 2; ++q) {
      blk[q] = h.xi[k].real().cast<Complex>().cwiseProduct(comp[q]);
      if (r > 0) {
        const CVector th = h.theta[k].cast<Complex>();
        tmp = th.cwiseProduct(comp[q]);
        p.apply(tmp.data(), ptmp.data());
        blk[q] += 0.5 * kLightSpeed * (th.cwiseProduct(pcomp[q]) + ptmp);
      }
    }
    const auto& s = pauli(r);
    out.head(n) += s(0, 0) * blk[0] + s(0, 1) * blk[1];
    out.tail(n) += s(1, 0) * blk[0] + s(1, 1) * blk[1];
  }
  return out;
}

CMatrix numeric_generator(const StepBuilder& builder, double t, double tau) {
  StepBuilder b = builder;
  b.mode = StepMode::Modified;
  const auto u = modified_step(b, t, tau);
  return (kI * kHbar / tau) * (u.matrix - CMatrix::Identity(u.matrix.rows(), u.matrix.cols()));
}

CVector apply_numeric_generator(const StepKernel& kernel, double tau, const CVector& psi) {
  CVector v = psi;
  kernel.apply(v);
  return (kI * kHbar / tau) * (v - psi);
}

CVector apply_numeric_generator_adjoint(const StepKernel& kernel, double tau, const CVector& psi) {
  CVector v = psi;
  kernel.apply_adjoint(v);
  return (-kI * kHbar / tau) * (v - psi);
}

const std::vector<TestPacket>& default_test_packets() {
  static const std::vector<TestPacket> packets{{0.0, 0.08, 0.0}, {0.05, 0.1, 3.0}, {-0.05, 0.1, -2.0}};
  return packets;
}

std::vector<CVector> gaussian_bank(const Lattice& lattice, std::span<const CVector> coin_states) {
  const int n = lattice.n_sites();
  const double window = n * lattice.spacing();
  std::vector<CVector> bank;
  for (const auto& pk : default_test_packets()) {
    const double k = 2.0 * std::numbers::pi * std::round(pk.momentum * window / (2.0 * std::numbers::pi)) / window;
    CVector g(n);
    for (int j = 0; j < n; ++j) {
      const double x = lattice.position(j);
      const double d = x - pk.center;
      g[j] = std::exp(-d * d / (4.0 * pk.width * pk.width)) * std::polar(1.0, k * x);
    }
    g.normalize();
    for (const auto& coin : coin_states) {
      const Eigen::Index dim = coin.size();
      CVector psi(dim * n);
      for (Eigen::Index c = 0; c < dim; ++c) psi.segment(c * n, n) = coin[c] * g;
      bank.push_back(std::move(psi));
    }
  }
  return bank;
}

std::vector<CVector> smooth_test_bank(const Lattice& lattice) {
  std::vector<CVector> coins(3, CVector(2));
  coins[0] << 1.0, 0.0;
  coins[1] << 0.0, 1.0;
  coins[2] << 1.0 / std::sqrt(2.0), kI / std::sqrt(2.0);
  return gaussian_bank(lattice, coins);
}

double fit_slope(std::span<const double> lx, std::span<const double> ly) {
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ConvergenceReport convergence_order(const std::function<ConvergenceRow(double L)>& measure,
                                    std::span<const double> L_list) {
  if (L_list.size() < 3) throw ValidationError("convergence study needs at least 3 resolutions");
  ConvergenceReport rep;
  for (double L : L_list) rep.rows.push_back(measure(L));

  bool degenerate = true;
  for (const auto& r : rep.rows) degenerate = degenerate && r.error < kDegenerateError;
  if (degenerate) {
    rep.status = ConvergenceStatus::Degenerate;
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    rep.hermiticity_slope = std::numeric_limits<double>::quiet_NaN();
    rep.diagnostics = "error identically zero at every resolution; slope undefined";
    return rep;
  }

  std::vector<double> lx, ly, lh;
  bool herm_ok = true;
  for (const auto& r : rep.rows) {
    lx.push_back(std::log(1.0 / r.L));
    ly.push_back(std::log(std::max(r.error, 1e-300)));
    herm_ok = herm_ok && r.hermiticity_defect > 0.0;
    lh.push_back(std::log(std::max(r.hermiticity_defect, 1e-300)));
  }
  rep.slope = fit_slope(lx, ly);
  rep.hermiticity_slope = herm_ok ? fit_slope(lx, lh) : std::numeric_limits<double>::quiet_NaN();

  std::ostringstream diag;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (!(rep.rows[i].error < rep.rows[i - 1].error)) {
      rep.status = ConvergenceStatus::NonMonotone;
      diag << "error did not decrease from L=" << rep.rows[i - 1].L << " (" << rep.rows[i - 1].error
           << ") to L=" << rep.rows[i].L << " (" << rep.rows[i].error << "); ";
    }
  }
  rep.diagnostics = diag.str();
  return rep;
}

int window_sites(double L, double half_width) {
  return static_cast<int>(std::lround(2.0 * half_width * L));
}

ConvergenceReport convergence_order(const BuilderFactory& builder_for, const CoefficientFn& coefficients,
                                    std::span<const double> L_list, const ConvergenceWindow& window) {
  auto measure = [&](double L) {
    const Lattice lat = make_lattice(window_sites(L, window.half_width), 1.0 / L);
    const StepBuilder b = builder_for(lat);
    const double tau = lat.spacing() / kLightSpeed;
    const StepKernel kernel(b, window.t, tau);
    const auto coeffs = coefficients(b, window.t);
    const MomentumOperator p(lat);
    ConvergenceRow row{L, 0.0, 0.0};
    for (const auto& psi : smooth_test_bank(lat)) {
      const CVector hn = apply_numeric_generator(kernel, tau, psi);
      const CVector hn_dag = apply_numeric_generator_adjoint(kernel, tau, psi);
      const CVector ha = apply_hamiltonian(coeffs, p, psi);
      row.error = std::max(row.error, (hn - ha).norm());
      row.hermiticity_defect = std::max(row.hermiticity_defect, (hn - hn_dag).norm());
    }
    return row;
  };
  return convergence_order(measure, L_list);
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "L,error,hermiticity_defect\n";
  out.precision(17);
  for (const auto& r : report.rows) out << r.L << ',' << r.error << ',' << r.hermiticity_defect << '\n';
}

}  // namespace sdqw
