#include "sdqw/geometry.hpp"

#include "sdqw/hamiltonian.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace sdqw {

MetricSpec flat_metric(double mass) {
  MetricSpec s;
  s.e00 = [](double, double) { return 1.0; };
  s.e11 = [](double, double) { return 1.0; };
  s.A0 = [](double, double) { return 0.0; };
  s.A1 = [](double, double) { return 0.0; };
  s.mass = [mass](double, double) { return mass; };
  s.ratio_dx = [](double, double) { return 0.0; };
  return s;
}

namespace {

std::string site_message(const char* what, int site, double x, double t, double value) {
  std::ostringstream os;
  os << what << " at site " << site << " (x=" << x << ", t=" << t << ", value " << value << ")";
  return os.str();
}

// Running trapezoid integral of a site function from the leftmost site, memoized per time.
class CumulativeIntegral {
 public:
  CumulativeIntegral(ScalarField integrand, Lattice lattice)
      : f_(std::move(integrand)), lat_(lattice) {}

  double operator()(double x, double t) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!valid_ || t != t_) refresh(t);
    const double s = (x - lat_.position(0)) / lat_.spacing();
    if (s <= 0.0) return 0.0;
    const int n = lat_.n_sites();
    const int j = std::min(static_cast<int>(std::floor(s)), n - 1);
    const double frac = s - j;
    if (frac == 0.0 || j == n - 1) return cum_[static_cast<std::size_t>(j)];
    // Partial trapezoid between lattice nodes.
    const double x0 = lat_.position(j);
    const double f0 = vals_[static_cast<std::size_t>(j)];
    const double f1 = f_(x, t);
    return cum_[static_cast<std::size_t>(j)] + 0.5 * (f0 + f1) * (x - x0);
  }

 private:
  void refresh(double t) {
    const int n = lat_.n_sites();
    vals_.assign(static_cast<std::size_t>(n), 0.0);
    cum_.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) vals_[static_cast<std::size_t>(j)] = f_(lat_.position(j), t);
    for (int j = 1; j < n; ++j)
      cum_[static_cast<std::size_t>(j)] =
          cum_[static_cast<std::size_t>(j - 1)] +
          0.5 * (vals_[static_cast<std::size_t>(j - 1)] + vals_[static_cast<std::size_t>(j)]) * lat_.spacing();
    t_ = t;
    valid_ = true;
  }

  ScalarField f_;
  Lattice lat_;
  std::mutex mu_;
  bool valid_ = false;
  double t_ = 0.0;
  std::vector<double> vals_, cum_;
};

}  // namespace

CoinPair metric_to_coin(const MetricSpec& spec, const Lattice& lattice, const MappingOptions& options,
                        std::span<const double> check_times) {
  if (!spec.e00 || !spec.e11 || !spec.A0 || !spec.A1 || !spec.mass)
    throw ValidationError("metric spec is missing a field");
  const std::vector<double> default_times{0.0};
  const auto times = check_times.empty() ? std::span<const double>(default_times) : check_times;
  for (double t : times) {
    for (int j = 0; j < lattice.n_sites(); ++j) {
      const double x = lattice.position(j);
      const double e0 = spec.e00(x, t);
      if (!(e0 > 0.0)) throw DomainError(site_message("e00 must be positive", j, x, t, e0), j, x, t);
      const double r = spec.e11(x, t) / e0;
      if (!(std::abs(r) <= 1.0))
        throw DomainError(site_message("|e11/e00| exceeds 1", j, x, t, r), j, x, t);
    }
  }

  const MetricSpec s = spec;
  const double h = lattice.spacing();
  auto ratio = [s](double x, double t) {
    const double r = s.e11(x, t) / s.e00(x, t);
    if (!(std::abs(r) <= 1.0)) throw DomainError(site_message("|e11/e00| exceeds 1", -1, x, t, r), -1, x, t);
    return r;
  };
  auto ratio_dx = [s, ratio, h](double x, double t) {
    if (s.ratio_dx) return s.ratio_dx(x, t);
    return (ratio(x + h, t) - ratio(x - h, t)) / (2.0 * h);
  };
  auto theta1 = [ratio](double x, double t) { return 0.5 * std::acos(ratio(x, t)); };
  auto dtheta1 = [ratio, ratio_dx](double x, double t) {
    const double r = ratio(x, t);
    const double dr = ratio_dx(x, t);
    // A stationary ratio gives a stationary angle, even at |r| = 1.
    if (dr == 0.0) return 0.0;
    return -0.5 * dr / std::sqrt(1.0 - r * r);
  };
  auto mass_term = [s](double x, double t) {
    return s.mass(x, t) * kLightSpeed * kLightSpeed / (kHbar * s.e00(x, t));
  };
  const bool cancel = options.mass_split == MassSplit::CancelGradientOnCoin1;
  const bool a0_on_1 = options.potential_split == PotentialSplit::Coin1;
  const ScalarField zero = [](double, double) { return 0.0; };

  CoinPair out;
  RestrictedCoinField& c1 = out.coin1;
  RestrictedCoinField& c2 = out.coin2;
  c1.label = 1;
  c2.label = 2;
  c1.theta = theta1;
  c1.dtheta = dtheta1;
  c2.theta = [theta1](double x, double t) { return -2.0 * theta1(x, t); };
  c2.dtheta = [dtheta1](double x, double t) { return -2.0 * dtheta1(x, t); };
  if (cancel) {
    c1.vartheta = [dtheta1](double x, double t) { return -kLightSpeed * dtheta1(x, t); };
    c2.vartheta = mass_term;
  } else {
    c1.vartheta = zero;
    c2.vartheta = [mass_term, dtheta1](double x, double t) {
      return mass_term(x, t) - kLightSpeed * dtheta1(x, t);
    };
  }
  const ScalarField a0 = s.A0;
  c1.lambda = a0_on_1 ? a0 : zero;
  c2.lambda = a0_on_1 ? zero : a0;

  // d(xi1)/dx = -A1 cos(2 theta1) / c
  ScalarField dxi1 = [s, ratio](double x, double t) { return -s.A1(x, t) * ratio(x, t) / kLightSpeed; };
  auto integral = std::make_shared<CumulativeIntegral>(dxi1, lattice);
  c1.xi = [integral](double x, double t) { return (*integral)(x, t); };
  c1.dxi = dxi1;
  c2.xi = zero;
  c2.dxi = zero;
  out.phase_convention = "xi1 = 0 at the leftmost lattice site (trapezoid integration of dxi1/dx)";
  return out;
}

MetricRecovery coin_to_metric(const RestrictedCoinField& coin1, const RestrictedCoinField& coin2,
                              const ScalarField& e00, const Lattice& lattice,
                              std::span<const double> check_times) {
  const std::vector<double> default_times{0.0};
  const auto times = check_times.empty() ? std::span<const double>(default_times) : check_times;
  MetricRecovery out;
  for (double t : times) {
    const auto dxi1 = sample_derivative(coin1.xi, coin1.dxi, lattice, t, DerivativePolicy::AllowFallback, "dxi1");
    const auto dxi2 = sample_derivative(coin2.xi, coin2.dxi, lattice, t, DerivativePolicy::AllowFallback, "dxi2");
    for (int j = 0; j < lattice.n_sites(); ++j) {
      const double x = lattice.position(j);
      const double t1 = coin1.theta(x, t), t2 = coin2.theta(x, t);
      if (std::abs(t2 + 2.0 * t1) > kComparableTolerance)
        throw ValidationError(site_message("coins are outside the theta2 = -2 theta1 family", j, x, t, t2 + 2 * t1));
      if (std::abs(dxi2.values[static_cast<std::size_t>(j)]) > kComparableTolerance)
        throw ValidationError(site_message("second coin phase must be x-independent", j, x, t,
                                           dxi2.values[static_cast<std::size_t>(j)]));
      if (std::abs(std::cos(2.0 * t1)) < 1e-12 &&
          std::find(out.a1_singular_sites.begin(), out.a1_singular_sites.end(), j) == out.a1_singular_sites.end())
        out.a1_singular_sites.push_back(j);
    }
  }

  const RestrictedCoinField f1 = coin1, f2 = coin2;
  const ScalarField norm = e00;
  const Lattice lat = lattice;
  auto dtheta1 = [f1, lat](double x, double t) {
    if (f1.dtheta) return f1.dtheta(x, t);
    const double h = lat.spacing();
    return (f1.theta(x + h, t) - f1.theta(x - h, t)) / (2.0 * h);
  };
  auto dxi1 = [f1, lat](double x, double t) {
    if (f1.dxi) return f1.dxi(x, t);
    const double h = lat.spacing();
    return (f1.xi(x + h, t) - f1.xi(x - h, t)) / (2.0 * h);
  };

  MetricSpec& m = out.spec;
  m.e00 = norm;
  m.e11 = [f1, norm](double x, double t) { return norm(x, t) * std::cos(2.0 * f1.theta(x, t)); };
  m.A0 = [f1, f2](double x, double t) { return f1.lambda(x, t) + f2.lambda(x, t); };
  m.A1 = [f1, dxi1](double x, double t) {
    const double cs = std::cos(2.0 * f1.theta(x, t));
    if (std::abs(cs) < 1e-12)
      throw DomainError(site_message("A1 is singular where cos(2 theta1) = 0", -1, x, t, cs), -1, x, t);
    return -kLightSpeed * dxi1(x, t) / cs;
  };
  m.mass = [f1, f2, norm, dtheta1](double x, double t) {
    const double rhs = kHbar * (f1.vartheta(x, t) + f2.vartheta(x, t)) + kHbar * kLightSpeed * dtheta1(x, t);
    return norm(x, t) * rhs / (kLightSpeed * kLightSpeed);
  };
  m.ratio_dx = [f1, dtheta1](double x, double t) {
    return -2.0 * std::sin(2.0 * f1.theta(x, t)) * dtheta1(x, t);
  };
  return out;
}

CMatrix dirac_hamiltonian_1p1(const MetricSpec& spec, const Lattice& lattice, double t) {
  const int n = lattice.n_sites();
  const CMatrix P = MomentumOperator(lattice).matrix();
  CVector r(n), a0(n), a1r(n), mass(n);
  for (int j = 0; j < n; ++j) {
    const double x = lattice.position(j);
    const double e0 = spec.e00(x, t);
    r[j] = spec.e11(x, t) / e0;
    a0[j] = spec.A0(x, t);
    a1r[j] = r[j] * spec.A1(x, t);
    mass[j] = kLightSpeed * kLightSpeed * spec.mass(x, t) / e0;
  }
  const CMatrix transport = 0.5 * kLightSpeed * (r.asDiagonal() * P + P * r.asDiagonal());
  CMatrix H = CMatrix::Zero(2 * n, 2 * n);
  const CMatrix diag_a0 = (-kHbar * a0).asDiagonal();
  const CMatrix diag_a1 = (-kHbar * a1r).asDiagonal();
  const CMatrix diag_m = mass.asDiagonal();
  H.topLeftCorner(n, n) = diag_a0 + transport + diag_a1;
  H.bottomRightCorner(n, n) = diag_a0 - transport - diag_a1;
  H.topRightCorner(n, n) = diag_m;
  H.bottomLeftCorner(n, n) = diag_m;
  return H;
}

double dispersion(double k, double theta1, double theta2, double tau, double a) {
  double arg = std::cos(theta1) * std::cos(theta2) * std::cos(k * a / kHbar) - std::sin(theta1) * std::sin(theta2);
  arg = std::clamp(arg, -1.0, 1.0);
  return kHbar / tau * std::acos(arg);
}

LightCone linear_light_cone(double x0, double t, double offset) {
  return {(x0 + offset) * std::exp(-t) - offset, (x0 + offset) * std::exp(t) - offset};
}

LightCone light_cone_boundary(double x0, double t, const MetricSpec& spec) {
  namespace ode = boost::numeric::odeint;
  if (t == 0.0) return {x0, x0};
  using State = std::array<double, 1>;
  LightCone out;
  for (int sign : {-1, +1}) {
    State x{x0};
    auto rhs = [&](const State& s, State& dsdt, double tt) {
      dsdt[0] = sign * kLightSpeed * spec.e11(s[0], tt) / spec.e00(s[0], tt);
    };
    auto stepper = ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<State>());
    std::size_t steps = 0;
    try {
      steps = ode::integrate_adaptive(stepper, rhs, x, 0.0, t, t / 100.0);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "light-cone integration failed from x0=" << x0 << " to t=" << t << ": " << e.what();
      throw std::runtime_error(os.str());
    }
    if (!std::isfinite(x[0])) {
      std::ostringstream os;
      os << "light-cone integration diverged from x0=" << x0 << " to t=" << t << " after " << steps << " steps";
      throw std::runtime_error(os.str());
    }
    (sign < 0 ? out.left : out.right) = x[0];
  }
  return out;
}

Embedding2p1 embed_2p1(const RestrictedCoinField& coin1, const RestrictedCoinField& coin2, double k_y,
                       const Lattice& lattice, double t) {
  const int n = lattice.n_sites();
  const auto dth2 = sample_derivative(coin2.theta, coin2.dtheta, lattice, t, DerivativePolicy::AllowFallback, "dtheta2");
  const auto dxi1 = sample_derivative(coin1.xi, coin1.dxi, lattice, t, DerivativePolicy::AllowFallback, "dxi1");
  const auto dxi2 = sample_derivative(coin2.xi, coin2.dxi, lattice, t, DerivativePolicy::AllowFallback, "dxi2");
  Embedding2p1 e;
  e.k_y = k_y;
  for (int j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double x = lattice.position(j);
    const double t1 = coin1.theta(x, t), t2 = coin2.theta(x, t);
    const double a1 = 2 * t1, a2 = 2 * t1 + 2 * t2;
    e.e2_0.push_back(0.5);
    e.e1_2.push_back(0.5 * std::sin(a1) + 0.5 * std::sin(a2));
    e.e1_1.push_back(0.5 * std::cos(a1) + 0.5 * std::cos(a2));
    e.e2_1.push_back(0.5 * std::cos(a2));
    e.e2_2.push_back(0.5 * std::sin(a2));
    e.A0.push_back(coin1.lambda(x, t) + coin2.lambda(x, t));
    e.A1.push_back(-kLightSpeed * dxi1.values[k]);
    e.A2.push_back(-kLightSpeed * dxi2.values[k] + k_y * kLightSpeed / kHbar);
    e.mass_over_e00.push_back(kHbar * (coin1.vartheta(x, t) + coin2.vartheta(x, t)) -
                              0.5 * kHbar * kLightSpeed * dth2.values[k]);
    // g^{mu nu} = e^mu_(0) e^nu_(0) - e^mu_(1) e^nu_(1) - e^mu_(2) e^nu_(2), e^1_(0) = 0.
    Eigen::Matrix3d v;  // rows mu = 0,1,2; columns frame index 0,1,2; scaled by 1/e00
    v << 1.0, 0.0, 0.0,
         0.0, e.e1_1.back(), e.e1_2.back(),
         e.e2_0.back(), e.e2_1.back(), e.e2_2.back();
    const Eigen::Matrix3d eta = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
    e.metric.push_back(v * eta * v.transpose());
  }
  return e;
}

MonotonicityReport monotonicity_check(double theta1, double theta2, double tau, double a, int samples) {
  MonotonicityReport rep;
  if (!(std::cos(theta1) * std::cos(theta2) > 1e-12)) {
    rep.message = "not applicable: cos(theta1) cos(theta2) <= 0";
    return rep;
  }
  rep.applicable = true;
  const double kmax = std::numbers::pi * kHbar / a;
  double prev_k = 0.0, prev_e = dispersion(0.0, theta1, theta2, tau, a);
  for (int i = 1; i <= samples; ++i) {
    const double k = kmax * i / samples;
    const double e = dispersion(k, theta1, theta2, tau, a);
    if (!(e > prev_e)) {
      rep.violation = std::make_pair(prev_k, k);
      std::ostringstream os;
      os << "E(|k|) not increasing between |k| = " << prev_k << " and " << k;
      rep.message = os.str();
      return rep;
    }
    prev_k = k;
    prev_e = e;
  }
  rep.monotone = true;
  rep.message = "E(|k|) strictly increasing on the half zone";
  return rep;
}

}  // namespace sdqw
