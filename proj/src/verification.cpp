#include "sdqw/verification.hpp"

#include "sdqw/evolution.hpp"
#include "sdqw/gauge_un.hpp"
#include "sdqw/geometry.hpp"
#include "sdqw/hamiltonian.hpp"
#include "sdqw/qubit.hpp"
#include "sdqw/sample_fields.hpp"
#include "sdqw/scenario.hpp"
#include "sdqw/two_particle.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sdqw {

namespace {

using std::numbers::pi;
using namespace samples;
using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_ = Clock::now();
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult make_result(std::string id, std::string description, double measured, bool value_ok,
                        std::string comparison, const Stopwatch& sw, double time_limit,
                        std::string detail = {}) {
  CheckResult r;
  r.id = std::move(id);
  r.description = std::move(description);
  r.measured = measured;
  r.comparison = std::move(comparison);
  r.seconds = sw.seconds();
  r.time_limit = time_limit;
  r.passed = value_ok && (time_limit <= 0.0 || r.seconds < time_limit);
  r.detail = std::move(detail);
  if (value_ok && !r.passed) r.detail += (r.detail.empty() ? "" : "; ") + std::string("over the time limit");
  return r;
}

CheckResult failed(std::string id, std::string description, const std::exception& e) {
  CheckResult r;
  r.id = std::move(id);
  r.description = std::move(description);
  r.measured = std::nan("");
  r.detail = std::string("exception: ") + e.what();
  return r;
}

bool slope_ok(const ConvergenceReport& rep) {
  return rep.status == ConvergenceStatus::Ok && rep.slope >= 0.8 && rep.slope <= 1.2;
}

MetricSpec rindler_metric(double a, double mass) {
  MetricSpec s = flat_metric(mass);
  s.e11 = [a](double x, double) { return x + 5 * a; };
  s.ratio_dx = [](double, double) { return 1.0; };
  return s;
}

MetricSpec trig_metric(double mass) {
  MetricSpec s = flat_metric(mass);
  s.e00 = [](double, double t) { return 1.0 / t; };
  s.e11 = [](double x, double t) { return std::cos(pi / 4 + 4 * x) / t; };
  s.ratio_dx = [](double x, double) { return -4 * std::sin(pi / 4 + 4 * x); };
  return s;
}

// Support above the threshold is invariant under the ring reflection j -> 2 origin - j (mod n).
bool support_symmetric(const std::vector<double>& p, const Lattice& lat, double threshold) {
  const int o = lat.origin_index();
  for (int j = 0; j < lat.n_sites(); ++j) {
    const int m = lat.wrap(2 * o - j);
    if ((p[static_cast<std::size_t>(j)] > threshold) != (p[static_cast<std::size_t>(m)] > threshold)) return false;
  }
  return true;
}

}  // namespace

VerificationLevel verification_level_from_string(std::string_view s) {
  if (s.empty() || s == "quick" || s == "Quick") return VerificationLevel::Quick;
  if (s == "full" || s == "Full") return VerificationLevel::Full;
  throw ValidationError("verification level must be quick or full");
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["level"] = level == VerificationLevel::Quick ? "quick" : "full";
  j["passed"] = all_passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["description"] = c.description;
    e["passed"] = c.passed;
    if (std::isfinite(c.measured)) e["measured"] = c.measured;
    else e["measured"] = nullptr;
    e["criterion"] = c.comparison;
    e["seconds"] = c.seconds;
    if (c.time_limit > 0) e["time_limit_seconds"] = c.time_limit;
    e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.id << " " << c.description << ": measured " << fmt(c.measured)
       << " (want " << c.comparison << "), " << fmt(c.seconds) << " s";
    if (c.time_limit > 0) os << " (limit " << c.time_limit << " s)";
    if (!c.detail.empty()) os << " [" << c.detail << "]";
    os << "\n";
  }
  return os.str();
}

CheckResult check_unitarity() {
  const char* desc = "unitarity of shifts, coins and steps (single, U(N), two-particle)";
  const Stopwatch sw;
  try {
    const int n = 64;
    const Lattice lat = make_lattice(n, 1.0 / n);
    const double tau = lat.spacing(), t = 0.37;
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    auto track = [&](const LinearOperator& op) { worst = std::max(worst, op.unitarity_defect()); };

    track(build_shift(lat, ShiftDirection::Plus, 2));
    track(build_shift(lat, ShiftDirection::Minus, 2));
    track(build_shift(lat, ShiftDirection::Plus, 6));
    for (int s = 0; s < 3; ++s) {
      const auto r1 = random_restricted(rng, 1), r2 = random_restricted(rng, 2);
      const auto g1 = random_general(rng, 1), g2 = random_general(rng, 2);
      track(build_coin_restricted(r1, t, tau, lat));
      track(build_coin(g1, t, tau, lat));
      for (StepMode mode : {StepMode::Conventional, StepMode::Modified}) {
        track(step_operator(StepBuilder{r1, r2, lat, mode}, t, tau));
        track(step_operator(StepBuilder{g1, g2, lat, mode}, t, tau));
        track(step_operator(StepBuilder{r1, g2, lat, mode}, t, tau));
      }
    }
    for (int N : {2, 3}) {
      const GeneratorSet g = make_generators(N);
      GaugeStepBuilder b{{random_general(rng, 1), random_weight(rng, g.size()), random_weight(rng, g.size())},
                         {random_restricted(rng, 2), random_weight(rng, g.size()), random_weight(rng, g.size())},
                         g,
                         lat};
      track(build_coin_un(b.coin1, g, t, tau, lat));
      for (StepMode mode : {StepMode::Conventional, StepMode::Modified}) {
        b.mode = mode;
        track(gauge_step_operator(b, t, tau));
      }
    }
    const Lattice pair_lat = make_lattice(12, 0.05);
    for (std::uint64_t seed : {11u, 12u}) {
      const TwoCoinField c1 = random_pair(seed, 1), c2 = random_pair(seed + 100, 2);
      track(build_two_coin(c1, t, 0.05, pair_lat));
      for (StepMode mode : {StepMode::Conventional, StepMode::Modified})
        track(two_particle_step(c1, c2, t, 0.05, pair_lat, mode));
    }
    track(build_two_shift(pair_lat, ShiftDirection::Plus));
    track(build_two_shift(pair_lat, ShiftDirection::Minus));
    return make_result("1", desc, worst, worst < 1e-12, "< 1e-12", sw, 30.0);
  } catch (const std::exception& e) {
    return failed("1", desc, e);
  }
}

CheckResult check_norm_conservation() {
  const char* desc = "norm conservation over the fig3 run";
  const Stopwatch sw;
  try {
    const ScenarioResult r = run_scenario(builtin_scenario("fig3"));
    const double drift = r.summary.max_norm_drift;
    return make_result("N", desc, drift, drift < 1e-10, "< 1e-10", sw, 10.0);
  } catch (const std::exception& e) {
    return failed("N", desc, e);
  }
}

CheckResult check_qubit_identities() {
  const char* desc = "two-qubit shift expansions term for term; reconstruction for n <= 4";
  const Stopwatch sw;
  try {
    using P = PauliLabel;
    auto one = [](Complex c, P a) { return pauli_term(c, {a}); };
    const PauliDecomposition id = one(1.0, P::I), z = one(1.0, P::Z);
    const PauliDecomposition lower = one(1.0, P::X) - one(kI, P::Y);
    const PauliDecomposition raise = one(1.0, P::X) + one(kI, P::Y);
    auto cyclic = [](int n, int step) {
      CMatrix m = CMatrix::Zero(n, n);
      for (int j = 0; j < n; ++j) m(((j + step) % n + n) % n, j) = 1.0;
      return m;
    };
    std::vector<std::string> mismatches;

    const PauliDecomposition bracket_plus = kron(id, lower) + kron(one(1.0, P::X), raise);
    const PauliDecomposition bracket_minus = kron(id, raise) + kron(one(1.0, P::X), lower);
    // Position-only shifts on two qubits.
    if (!equivalent(decompose(cyclic(4, 1)), Complex(0.5) * bracket_plus)) mismatches.push_back("S+ position");
    if (!equivalent(decompose(cyclic(4, -1)), Complex(0.5) * bracket_minus)) mismatches.push_back("S- position");
    // Coin-controlled shifts on coin + two position qubits.
    const PauliDecomposition ii = pauli_term(1.0, {P::I, P::I});
    PauliDecomposition want_plus = Complex(0.25) * kron(id + z, bracket_plus) + Complex(0.5) * kron(id - z, ii);
    PauliDecomposition want_minus = Complex(0.5) * kron(id + z, ii) + Complex(0.25) * kron(id - z, bracket_minus);
    want_plus.reg = want_minus.reg = QubitRegister{2, true};
    const PauliDecomposition sp = shift_with_coin(2, ShiftDirection::Plus);
    const PauliDecomposition sm = shift_with_coin(2, ShiftDirection::Minus);
    if (!equivalent(sp, want_plus)) mismatches.push_back("S+ with coin");
    if (!equivalent(sm, want_minus)) mismatches.push_back("S- with coin");
    const PauliDecomposition ident = decompose(CMatrix::Identity(4, 4));
    if (ident.terms.size() != 1 || ident.terms[0].label() != "II" || ident.terms[0].coefficient != Complex(1.0))
      mismatches.push_back("identity");

    // Coefficients are exact quarter or half rationals.
    auto exact = [](double v) {
      return v == 0.0 || std::abs(v) == 0.25 || std::abs(v) == 0.5 || std::abs(v) == 1.0;
    };
    for (const auto* d : {&sp, &sm})
      for (const auto& term : d->terms)
        if (!exact(term.coefficient.real()) || !exact(term.coefficient.imag()))
          mismatches.push_back("inexact coefficient on " + term.label());

    double worst = 0.0;
    for (int n = 1; n <= 4; ++n)
      for (ShiftDirection d : {ShiftDirection::Plus, ShiftDirection::Minus}) {
        const CMatrix direct = build_shift(Lattice(1 << n, 1.0, 0), d, 2).matrix;
        worst = std::max(worst, max_abs(shift_with_coin(n, d).reconstruct() - direct));
        const CMatrix pos = cyclic(1 << n, d == ShiftDirection::Plus ? 1 : -1);
        worst = std::max(worst, max_abs(decompose(pos).reconstruct() - pos));
      }
    std::string detail;
    for (const auto& m : mismatches) detail += (detail.empty() ? "" : ", ") + m;
    if (!detail.empty()) detail = "mismatch: " + detail;
    return make_result("2", desc, worst, mismatches.empty() && worst < 1e-12, "< 1e-12 and exact terms", sw, 5.0,
                       detail);
  } catch (const std::exception& e) {
    return failed("2", desc, e);
  }
}

CheckResult check_dispersion() {
  const char* desc = "eigenphases of the homogeneous step vs the dispersion relation";
  const Stopwatch sw;
  try {
    const int n = 64;
    const double a = 1.0, tau = 1.0;
    const Lattice lat = make_lattice(n, a);
    const auto ks = momentum_values(lat).values;
    auto phase_error = [&](double t1, double t2, bool massless) {
      const StepBuilder b{constant_restricted(t1, 0, 1), constant_restricted(t2, 0, 2), lat,
                          StepMode::Conventional};
      const CMatrix U = conventional_step(b, 0, 0).matrix;
      double worst = 0.0;
      for (double k : ks) {
        CMatrix w = CMatrix::Zero(2 * n, 2);
        for (int j = 0; j < n; ++j) {
          const Complex e = std::polar(1.0 / std::sqrt(double(n)), k * lat.position(j));
          w(j, 0) = e;
          w(n + j, 1) = e;
        }
        const Eigen::Matrix2cd block = w.adjoint() * U * w;
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(block);
        const double want = massless ? std::abs(k) * kLightSpeed : dispersion(k, t1, t2, tau, a);
        for (int q = 0; q < 2; ++q)
          worst = std::max(worst, std::abs(std::abs(std::arg(es.eigenvalues()[q])) / tau - want));
      }
      return worst;
    };
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-pi, pi);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double t1 = u(rng), t2 = u(rng);
      worst = std::max(worst, phase_error(t1, t2, false));
    }
    const double massless = phase_error(0.0, 0.0, true);
    return make_result("3", desc, worst, worst < 1e-10 && massless < 1e-12, "< 1e-10 (massless < 1e-12)", sw, 5.0,
                       "massless error " + fmt(massless));
  } catch (const std::exception& e) {
    return failed("3", desc, e);
  }
}

CheckResult check_hamiltonian_convergence() {
  const char* desc = "first-order convergence of the numeric generator to the assembled Hamiltonian";
  const Stopwatch sw;
  try {
    const std::vector<double> Ls{100, 200, 400, 800};
    const CoefficientFn coeff = [](const StepBuilder& b, double t) { return coefficients_for(b, t); };
    std::vector<std::pair<std::string, BuilderFactory>> cases;
    cases.emplace_back("fig3", [](const Lattice& lat) {
      const CoinPair c = metric_to_coin(flat_metric(0.04), lat);
      return StepBuilder{c.coin1, c.coin2, lat};
    });
    cases.emplace_back("fig4", [](const Lattice& lat) {
      const CoinPair c = metric_to_coin(rindler_metric(lat.spacing(), 0.04), lat);
      return StepBuilder{c.coin1, c.coin2, lat};
    });
    std::mt19937_64 rng(4004);
    for (int s = 0; s < 5; ++s) {
      const auto a = random_restricted(rng, 1), b = random_restricted(rng, 2);
      cases.emplace_back("random" + std::to_string(s), [a, b](const Lattice& lat) { return StepBuilder{a, b, lat}; });
    }
    double lo = 1e300, hi = -1e300;
    bool ok = true;
    std::string detail;
    for (const auto& [name, make] : cases) {
      const ConvergenceReport rep = convergence_order(make, coeff, Ls);
      lo = std::min(lo, rep.slope);
      hi = std::max(hi, rep.slope);
      ok = ok && slope_ok(rep);
      detail += (detail.empty() ? "" : ", ") + name + " " + fmt(rep.slope);
    }
    return make_result("4", desc, lo, ok, "slopes in [0.8, 1.2]", sw, 120.0,
                       "min " + fmt(lo) + " max " + fmt(hi) + "; " + detail);
  } catch (const std::exception& e) {
    return failed("4", desc, e);
  }
}

CheckResult check_general_vs_restricted() {
  const char* desc = "general coefficient formulas specialized to spin-x rotations";
  const Stopwatch sw;
  try {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), ut(0.0, 2.0);
    double worst = 0.0;
    // Ten field pairs, each sampled at 100 random points.
    RestrictedCoinField f1, f2;
    for (int s = 0; s < 1000; ++s) {
      if (s % 100 == 0) {
        f1 = random_restricted(rng, 1);
        f2 = random_restricted(rng, 2);
      }
      const double x = ux(rng), t = ut(rng);
      auto jet = [&](const RestrictedCoinField& f) {
        return RestrictedJet{f.theta(x, t), f.vartheta(x, t), f.dtheta(x, t), f.lambda(x, t), f.dxi(x, t)};
      };
      const RestrictedJet j1 = jet(f1), j2 = jet(f2);
      const CoefficientPoint g = general_coefficients(j1.to_general(), j2.to_general());
      const CoefficientPoint r = restricted_coefficients(j1, j2);
      for (std::size_t k = 0; k < 4; ++k) {
        worst = std::max(worst, std::abs(g.xi[k] - r.xi[k]));
        worst = std::max(worst, std::abs(g.theta[k] - r.theta[k]));
      }
    }
    return make_result("5", desc, worst, worst < 1e-10, "< 1e-10", sw, 5.0);
  } catch (const std::exception& e) {
    return failed("5", desc, e);
  }
}

CheckResult check_geometry_round_trip() {
  const char* desc = "metric -> coin -> metric round trip on the scenario metrics";
  const Stopwatch sw;
  try {
    double worst = 0.0;
    auto round_trip = [&](const MetricSpec& spec, const Lattice& lat, double t) {
      const std::vector<double> times{t};
      const CoinPair coins = metric_to_coin(spec, lat, {}, times);
      const MetricSpec back = coin_to_metric(coins.coin1, coins.coin2, spec.e00, lat, times).spec;
      for (int j = 0; j < lat.n_sites(); ++j) {
        const double x = lat.position(j);
        worst = std::max(worst, std::abs(back.ratio(x, t) - spec.ratio(x, t)));
        worst = std::max(worst, std::abs(back.e00(x, t) - spec.e00(x, t)));
        worst = std::max(worst, std::abs(back.A0(x, t) - spec.A0(x, t)));
        worst = std::max(worst, std::abs(back.mass(x, t) - spec.mass(x, t)));
      }
    };
    round_trip(flat_metric(0.04), make_lattice(400, 1.0 / 250), 0.0);
    round_trip(rindler_metric(1.0 / 250, 0.04), make_lattice(200, 1.0 / 250), 0.0);
    for (double t : {0.3, 1.0}) round_trip(trig_metric(0.04), make_lattice(400, 1.0 / 150), t);
    return make_result("6", desc, worst, worst < 1e-8, "< 1e-8", sw, 1.0);
  } catch (const std::exception& e) {
    return failed("6", desc, e);
  }
}

std::vector<CheckResult> check_scenarios() {
  std::vector<CheckResult> out;
  const Stopwatch sw3;
  std::optional<ScenarioResult> fig4;
  try {
    const ScenarioResult r = run_scenario(builtin_scenario("fig3"));
    bool symmetric = true;
    for (const auto& p : r.trajectory.profiles) symmetric = symmetric && support_symmetric(p, r.lattice, 1e-14);
    const double outside = r.summary.max_outside_cone.value_or(1.0);
    out.push_back(make_result("7a", "fig3: symmetric support, no probability outside |x| <= ct", outside,
                              symmetric && outside < 1e-14, "< 1e-14 and symmetric", sw3, 0.0,
                              symmetric ? "support symmetric at every step" : "support not symmetric"));
  } catch (const std::exception& e) {
    out.push_back(failed("7a", "fig3 scenario", e));
  }

  const Stopwatch sw4;
  try {
    fig4 = run_scenario(builtin_scenario("fig4"));
    const double secs = sw4.seconds();
    const ScenarioSummary& s = fig4->summary;
    out.push_back(make_result("7b", "fig4: probability at x >= 0 after the last step", s.final_mass_right,
                              s.final_mass_right >= 0.95, ">= 0.95", sw4, 0.0));
    const double outside = s.max_outside_cone.value_or(1.0);
    std::string detail = "final step " + fmt(s.final_outside_cone.value_or(1.0));
    if (s.first_wrap_step >= 0) detail += "; support reached the lattice edge at step " + std::to_string(s.first_wrap_step);
    out.push_back(make_result("7c", "fig4: probability outside the curved light cone (max over steps)", outside,
                              outside < 1e-14, "< 1e-14", sw4, 0.0, detail));
    CheckResult rt = make_result("7d", "fig4: runtime of 800 steps x 200 sites", secs, true, "< 60 s", sw4, 0.0);
    rt.seconds = secs;
    rt.passed = secs < 60.0;
    out.push_back(rt);
  } catch (const std::exception& e) {
    out.push_back(failed("7b", "fig4 scenario", e));
  }

  const Stopwatch sw5;
  try {
    const ScenarioResult r5 = run_scenario(builtin_scenario("fig5"));
    const double ipr4 = fig4 ? fig4->summary.final_ipr : std::nan("");
    const double ipr5 = r5.summary.final_ipr;
    out.push_back(make_result("7e", "fig5 vs fig4: final inverse participation ratio ratio", ipr5 / ipr4, ipr5 > ipr4,
                              "> 1", sw5, 0.0, "fig5 " + fmt(ipr5) + ", fig4 " + fmt(ipr4)));
  } catch (const std::exception& e) {
    out.push_back(failed("7e", "fig5 scenario", e));
  }
  return out;
}

std::vector<CheckResult> check_gauge_un() {
  std::vector<CheckResult> out;
  const Stopwatch sw;
  try {
    std::mt19937_64 rng(8008);
    const Lattice lat = make_lattice(16, 1.0 / 16);
    double worst = 0.0;
    for (double t : {0.0, 0.4, 1.3}) {
      // G1 = 0: diagonal first coin.
      const GaugeCoinField c1{constant_restricted(0.0, 0.3, 1), random_weight(rng, 4), random_weight(rng, 4)};
      const GaugeCoinField c2{random_general(rng, 2), random_weight(rng, 4), random_weight(rng, 4)};
      const ChiGrids chi = chi_coefficients(c1, c2, 2, lat, t);
      for (int q = 0; q < 4; ++q)
        worst = std::max({worst, chi.chi[1][q].cwiseAbs().maxCoeff(), chi.chi[2][q].cwiseAbs().maxCoeff()});
      // omega2 = Omega2 on the second coin.
      const GaugeWeight w = random_weight(rng, 9);
      const GaugeCoinField d1{random_general(rng, 1), random_weight(rng, 9), random_weight(rng, 9)};
      const GaugeCoinField d2{random_restricted(rng, 2), w, w};
      const ChiGrids chi3 = chi_coefficients(d1, d2, 3, lat, t);
      for (int q = 0; q < 9; ++q)
        worst = std::max({worst, chi3.chi[1][q].cwiseAbs().maxCoeff(), chi3.chi[2][q].cwiseAbs().maxCoeff()});
    }
    out.push_back(make_result("8a", "U(N): chi zero cases (G1 = 0, omega2 = Omega2)", worst, worst == 0.0, "== 0",
                              sw, 0.0));
  } catch (const std::exception& e) {
    out.push_back(failed("8a", "U(N) chi zero cases", e));
  }

  const Stopwatch sw2;
  try {
    const std::vector<double> Ls{100, 200, 400, 800};
    double lo = 1e300;
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {81u, 82u}) {
      for (bool general : {false, true}) {
        auto factory = [=](const Lattice& lat) {
          std::mt19937_64 rng(seed);
          const GeneratorSet g = make_generators(2);
          GaugeStepBuilder b{{}, {}, g, lat};
          if (general) {
            b.coin1.base = random_general(rng, 1);
            b.coin2.base = random_general(rng, 2);
          } else {
            b.coin1.base = random_restricted(rng, 1);
            b.coin2.base = random_restricted(rng, 2);
          }
          b.coin1.omega = random_weight(rng, g.size());
          b.coin1.Omega = random_weight(rng, g.size());
          b.coin2.omega = random_weight(rng, g.size());
          b.coin2.Omega = random_weight(rng, g.size());
          return b;
        };
        const ConvergenceReport rep = gauge_convergence_order(factory, Ls);
        lo = std::min(lo, rep.slope);
        ok = ok && slope_ok(rep);
        detail += (detail.empty() ? "" : ", ") + fmt(rep.slope);
      }
    }
    out.push_back(make_result("8b", "U(2): numeric generator vs assembled Hamiltonian convergence", lo, ok,
                              "slopes in [0.8, 1.2]", sw2, 0.0, "slopes " + detail));
  } catch (const std::exception& e) {
    out.push_back(failed("8b", "U(2) convergence", e));
  }
  if (out.size() == 2) {
    const double total = out[0].seconds + out[1].seconds;
    CheckResult rt;
    rt.id = "8c";
    rt.description = "U(N) suite runtime";
    rt.measured = total;
    rt.comparison = "< 60 s";
    rt.seconds = total;
    rt.passed = total < 60.0;
    out.push_back(rt);
  }
  return out;
}

std::vector<CheckResult> check_two_particle() {
  std::vector<CheckResult> out;
  const Stopwatch total;
  const Stopwatch sw;
  try {
    const Lattice lat = make_lattice(8, 0.03);
    const auto [c1, c2] = separation_pair(0.3, -0.1);
    double worst = 0.0;
    for (double t : {0.0, 0.2}) {
      const auto co = two_coefficients(c1, c2, t, lat, DerivativePolicy::AnalyticOnly);
      for (int j1 = 0; j1 < 8; ++j1)
        for (int j2 = 0; j2 < 8; ++j2) {
          const double x1 = lat.position(j1), x2 = lat.position(j2), d = x1 - x2;
          worst = std::max({worst, std::abs(co.xi03(j1, j2) - kI * d), std::abs(co.xi30(j1, j2) + kI * d),
                            std::abs(co.theta03_p2(j1, j2) - d * d), std::abs(co.theta30_p1(j1, j2) - d * d),
                            std::abs(co.xi12(j1, j2)), std::abs(co.xi21(j1, j2)), std::abs(co.theta12_p2(j1, j2)),
                            std::abs(co.theta21_p1(j1, j2)),
                            std::abs(co.xi11(j1, j2) - (0.3 - 0.2 * x2 - 0.1 + 0.1 * x1))});
        }
    }
    out.push_back(make_result("9a", "two-particle: separation example closed forms on an 8x8 grid", worst,
                              worst < 1e-12, "< 1e-12", sw, 0.0));
  } catch (const std::exception& e) {
    out.push_back(failed("9a", "two-particle closed forms", e));
  }

  const Stopwatch sw2;
  try {
    const TwoCoinField c1 = random_pair(91, 1), c2 = random_pair(92, 2);
    const std::vector<double> Ls{50, 100, 200};
    double lo = 1e300, hi = -1e300;
    std::string detail;
    for (auto [r1, r2] : {std::pair{0, 0}, std::pair{3, 3}, std::pair{2, 2}}) {
      std::vector<double> lx, ly;
      for (double L : Ls) {
        const Lattice lat = make_lattice(window_sites(L, 0.64), 1.0 / L);
        const TwoParticleKernel k(c1, c2, lat, 0.0, lat.spacing());
        double w = 0.0;
        for (const CVector& phi : two_particle_position_bank(lat))
          w = std::max(w, channel_projection(k, lat.spacing(), r1, r2, phi).norm());
        lx.push_back(std::log(1.0 / L));
        ly.push_back(std::log(w));
      }
      const double slope = fit_slope(lx, ly);
      lo = std::min(lo, slope);
      hi = std::max(hi, slope);
      detail += (detail.empty() ? "" : ", ") + std::to_string(r1) + std::to_string(r2) + " " + fmt(slope);
    }
    out.push_back(make_result("9b", "two-particle: vanished channels shrink first order", lo, lo >= 0.8 && hi <= 1.2,
                              "slopes in [0.8, 1.2]", sw2, 0.0, detail));
  } catch (const std::exception& e) {
    out.push_back(failed("9b", "two-particle vanished channels", e));
  }

  const Stopwatch sw3;
  try {
    const Lattice lat = make_lattice(6, 0.1);
    const auto co = two_coefficients(random_pair(93, 1), random_pair(94, 2), 0.2, lat);
    const TwoHamiltonianSplit s = hamiltonian_split(co);
    const CMatrix full = assemble_two_hamiltonian(co, lat);
    const CMatrix parts = assemble_two_hamiltonian(s.first, lat) + assemble_two_hamiltonian(s.second, lat) +
                          assemble_two_hamiltonian(s.interaction, lat);
    const double err = max_abs(full - parts);
    out.push_back(make_result("9c", "two-particle: hamiltonian_split reassembly", err, err < 1e-12, "< 1e-12", sw3, 0.0));
  } catch (const std::exception& e) {
    out.push_back(failed("9c", "two-particle split", e));
  }

  const Stopwatch sw4;
  try {
    double worst = 0.0;
    for (int n : {8, 12}) {
      const Lattice lat = make_lattice(n, 0.05);
      const CMatrix u = two_particle_step(distance_pair(0.5, 1), distance_pair(-0.7, 2), 0.2, 0.05, lat).matrix;
      const CMatrix swap = exchange_matrix(n);
      worst = std::max(worst, max_abs(u * swap - swap * u));
    }
    out.push_back(make_result("9d", "two-particle: exchange commutes with separation-dependent steps", worst,
                              worst < 1e-12, "< 1e-12", sw4, 0.0));
  } catch (const std::exception& e) {
    out.push_back(failed("9d", "two-particle exchange", e));
  }
  CheckResult rt;
  rt.id = "9e";
  rt.description = "two-particle suite runtime";
  rt.measured = total.seconds();
  rt.comparison = "< 120 s";
  rt.seconds = rt.measured;
  rt.passed = rt.measured < 120.0;
  out.push_back(rt);
  return out;
}

CheckResult check_determinism() {
  const char* desc = "identical builtin runs give byte-identical probability CSVs";
  const Stopwatch sw;
  try {
    int identical = 0;
    std::string detail;
    for (const auto& name : builtin_names()) {
      std::ostringstream a, b;
      write_probability_csv(a, run_scenario(builtin_scenario(name)));
      write_probability_csv(b, run_scenario(builtin_scenario(name)));
      if (a.str() == b.str()) ++identical;
      else detail += (detail.empty() ? "differs: " : ", ") + name;
    }
    const int n = static_cast<int>(builtin_names().size());
    return make_result("10", desc, identical, identical == n, "== " + std::to_string(n) + " scenarios", sw, 0.0,
                       detail);
  } catch (const std::exception& e) {
    return failed("10", desc, e);
  }
}

VerificationReport run_verification_suite(VerificationLevel level) {
  VerificationReport rep;
  rep.level = level;
  rep.checks.push_back(check_unitarity());
  rep.checks.push_back(check_norm_conservation());
  rep.checks.push_back(check_qubit_identities());
  if (level == VerificationLevel::Quick) return rep;
  rep.checks.push_back(check_dispersion());
  rep.checks.push_back(check_hamiltonian_convergence());
  rep.checks.push_back(check_general_vs_restricted());
  rep.checks.push_back(check_geometry_round_trip());
  for (auto& c : check_scenarios()) rep.checks.push_back(std::move(c));
  for (auto& c : check_gauge_un()) rep.checks.push_back(std::move(c));
  for (auto& c : check_two_particle()) rep.checks.push_back(std::move(c));
  rep.checks.push_back(check_determinism());
  return rep;
}

}  // namespace sdqw
