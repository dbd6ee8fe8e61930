#include "sdqw/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace sdqw {

namespace {

using std::numbers::pi;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ValidationError("expected an integer, got '" + s + "'");
  return v;
}

bool parse_switch(const std::string& s) {
  const std::string v = lower(s);
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ValidationError("expected on/off, got '" + s + "'");
}

double parse_constant(const std::string& s) {
  const Expression e = Expression::parse(s);
  for (Variable v : {Variable::X, Variable::T, Variable::X1, Variable::X2, Variable::A})
    if (e.depends_on(v)) throw ValidationError("expected a constant, got '" + s + "'");
  return e.evaluate({});
}

Expression parse_field(const std::string& s) {
  Expression e = Expression::parse(s);
  if (e.depends_on(Variable::X1) || e.depends_on(Variable::X2))
    throw ValidationError("single-particle fields use x, t and a only");
  return e;
}

OutputSelection parse_outputs(const std::string& s) {
  OutputSelection o{false, false, false, false};
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string v = lower(trim(item));
    if (v == "probability") o.probability = true;
    else if (v == "summary") o.summary = true;
    else if (v == "lightcone" || v == "light_cone") o.light_cone = true;
    else if (v == "gnuplot") o.gnuplot = true;
    else if (v == "all") o = OutputSelection{};
    else if (v == "none" || v.empty()) continue;
    else throw ValidationError("unknown output '" + v + "'");
  }
  return o;
}

using Setter = void (*)(ScenarioSpec&, const std::string&);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"name", [](ScenarioSpec& s, const std::string& v) { s.name = v; }},
      {"L", [](ScenarioSpec& s, const std::string& v) { s.L = parse_int(v); }},
      {"sites", [](ScenarioSpec& s, const std::string& v) { s.n_sites = parse_int(v); }},
      {"steps", [](ScenarioSpec& s, const std::string& v) { s.n_steps = parse_int(v); }},
      {"mass", [](ScenarioSpec& s, const std::string& v) { s.mass = parse_constant(v); }},
      {"metric", [](ScenarioSpec& s, const std::string& v) { s.metric = metric_choice_from_string(v); }},
      {"e00", [](ScenarioSpec& s, const std::string& v) { s.e00 = parse_field(v); }},
      {"e11", [](ScenarioSpec& s, const std::string& v) { s.e11 = parse_field(v); }},
      {"A0", [](ScenarioSpec& s, const std::string& v) { s.A0 = parse_field(v); }},
      {"A1", [](ScenarioSpec& s, const std::string& v) { s.A1 = parse_field(v); }},
      {"gauge", [](ScenarioSpec& s, const std::string& v) { s.gauge = parse_switch(v); }},
      {"xi1", [](ScenarioSpec& s, const std::string& v) { s.xi1 = parse_field(v); }},
      {"lambda1", [](ScenarioSpec& s, const std::string& v) { s.lambda1 = parse_field(v); }},
      {"coin0_re", [](ScenarioSpec& s, const std::string& v) { s.coin[0].real(parse_constant(v)); }},
      {"coin0_im", [](ScenarioSpec& s, const std::string& v) { s.coin[0].imag(parse_constant(v)); }},
      {"coin1_re", [](ScenarioSpec& s, const std::string& v) { s.coin[1].real(parse_constant(v)); }},
      {"coin1_im", [](ScenarioSpec& s, const std::string& v) { s.coin[1].imag(parse_constant(v)); }},
      {"site", [](ScenarioSpec& s, const std::string& v) { s.initial_site = parse_int(v); }},
      {"mode",
       [](ScenarioSpec& s, const std::string& v) {
         const std::string m = lower(v);
         if (m == "modified") s.mode = StepMode::Modified;
         else if (m == "conventional") s.mode = StepMode::Conventional;
         else throw ValidationError("mode must be modified or conventional");
       }},
      {"outputs", [](ScenarioSpec& s, const std::string& v) { s.outputs = parse_outputs(v); }},
      {"note", [](ScenarioSpec& s, const std::string& v) { s.notes.push_back(v); }},
  };
  return table;
}

std::string line_error(const std::string& source, int line, const std::string& what) {
  return source + ":" + std::to_string(line) + ": " + what;
}

ScalarField constant_field(double v) {
  return [v](double, double) { return v; };
}

MetricSpec metric_of(const ScenarioSpec& spec) {
  const double a = spec.spacing();
  MetricSpec m = flat_metric(spec.mass);
  switch (spec.metric) {
    case MetricChoice::Flat:
      m.ratio_dx = constant_field(0.0);
      break;
    case MetricChoice::StaticRindlerLike:
      m.e11 = [a](double x, double) { return x + 5.0 * a; };
      m.ratio_dx = constant_field(1.0);
      break;
    case MetricChoice::Custom: {
      m.e00 = spec.e00.field(a);
      m.e11 = spec.e11.field(a);
      m.A0 = spec.A0.field(a);
      m.A1 = spec.A1.field(a);
      // d/dx (e11 / e00)
      const ScalarField e00 = m.e00, e11 = m.e11;
      const ScalarField de00 = spec.e00.derivative(Variable::X).field(a);
      const ScalarField de11 = spec.e11.derivative(Variable::X).field(a);
      m.ratio_dx = [=](double x, double t) {
        const double u = e00(x, t);
        return (de11(x, t) * u - e11(x, t) * de00(x, t)) / (u * u);
      };
      break;
    }
    case MetricChoice::NonstaticTrig:
      // Only the ratio e11/e00 = cos(pi/4 + 4x) is used (for the causal cone).
      m.e11 = [](double x, double) { return std::cos(pi / 4 + 4 * x); };
      m.ratio_dx = [](double x, double) { return -4.0 * std::sin(pi / 4 + 4 * x); };
      break;
  }
  return m;
}

// Coin set for e00 = 1/t, e11 = cos(pi/4 + 4x)/t, given directly at coin level since e00
// diverges at t = 0.
CoinPair trig_coins(double mass) {
  CoinPair c;
  const ScalarField zero = constant_field(0.0);
  c.coin1.theta = [](double x, double) { return pi / 8 + 2 * x; };
  c.coin1.dtheta = constant_field(2.0);
  c.coin1.vartheta = constant_field(-2.0);
  c.coin1.xi = zero;
  c.coin1.dxi = zero;
  c.coin1.lambda = zero;
  c.coin1.label = 1;
  c.coin2.theta = [](double x, double) { return -pi / 4 - 4 * x; };
  c.coin2.dtheta = constant_field(-4.0);
  c.coin2.vartheta = [mass](double, double t) { return mass * t; };
  c.coin2.xi = zero;
  c.coin2.dxi = zero;
  c.coin2.lambda = zero;
  c.coin2.label = 2;
  c.phase_convention = "coin-level phases";
  return c;
}

void write_double(std::string& buf, double v) {
  char tmp[32];
  const int n = std::snprintf(tmp, sizeof tmp, "%.17g", v);
  buf.append(tmp, static_cast<std::size_t>(n));
}

}  // namespace

std::string to_string(MetricChoice m) {
  switch (m) {
    case MetricChoice::Flat: return "flat";
    case MetricChoice::StaticRindlerLike: return "static-rindler-like";
    case MetricChoice::NonstaticTrig: return "nonstatic-trig";
    case MetricChoice::Custom: return "custom";
  }
  return "?";
}

MetricChoice metric_choice_from_string(std::string_view s) {
  const std::string v = lower(std::string(s));
  if (v == "flat") return MetricChoice::Flat;
  if (v == "static-rindler-like") return MetricChoice::StaticRindlerLike;
  if (v == "nonstatic-trig") return MetricChoice::NonstaticTrig;
  if (v == "custom") return MetricChoice::Custom;
  throw ValidationError("unknown metric '" + std::string(s) +
                        "' (flat, static-rindler-like, nonstatic-trig, custom)");
}

void ScenarioSpec::validate() const {
  if (name.empty()) throw ValidationError("scenario name is empty");
  if (name.find_first_of("/\\") != std::string::npos)
    throw ValidationError("scenario name must not contain path separators");
  if (L <= 0) throw ValidationError("L must be a positive integer");
  if (n_sites <= 0) throw ValidationError("sites must be a positive integer");
  if (n_steps <= 0) throw ValidationError("steps must be a positive integer");
  if (!std::isfinite(mass)) throw ValidationError("mass must be finite");
  const int origin = n_sites / 2;
  if (origin + initial_site < 0 || origin + initial_site >= n_sites)
    throw ValidationError("initial site lies outside the lattice");
  const double norm = std::norm(coin[0]) + std::norm(coin[1]);
  if (std::abs(norm - 1.0) > 1e-10) throw ValidationError("initial coin amplitudes are not normalized");
  if (metric != MetricChoice::Custom &&
      (!e00.is_constant() || !e11.is_constant() || !A0.is_constant() || !A1.is_constant() ||
       e00.evaluate({}) != 1.0 || e11.evaluate({}) != 1.0 || A0.evaluate({}) != 0.0 ||
       A1.evaluate({}) != 0.0))
    throw ValidationError("e00, e11, A0 and A1 apply to the custom metric only");
  if (gauge && metric == MetricChoice::Custom && !(A0.is_constant() && A1.is_constant() &&
                                                   A0.evaluate({}) == 0.0 && A1.evaluate({}) == 0.0))
    throw ValidationError("coin-level gauge phases and metric potentials A0/A1 are exclusive");
}

ScenarioSpec parse_config(std::istream& in, const std::string& source) {
  ScenarioSpec spec;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(std::string_view(raw).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ValidationError(line_error(source, line, "expected 'key = value'"));
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ValidationError(line_error(source, line, "unknown key '" + key + "'"));
    if (key != "note" && !seen.insert(key).second)
      throw ValidationError(line_error(source, line, "duplicate key '" + key + "'"));
    if (value.empty()) throw ValidationError(line_error(source, line, "empty value for '" + key + "'"));
    try {
      it->second(spec, value);
    } catch (const std::exception& e) {
      throw ValidationError(line_error(source, line, key + ": " + e.what()));
    }
  }
  for (const char* required : {"L", "sites", "steps"})
    if (!seen.count(required))
      throw ValidationError(source + ": missing required key '" + std::string(required) + "'");
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return spec;
}

ScenarioSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "fig5"};
  return names;
}

ScenarioSpec builtin_scenario(std::string_view name) {
  ScenarioSpec s;
  s.name = std::string(name);
  s.mass = 0.04;
  if (name == "fig3") {
    s.L = 250;
    s.n_sites = 400;
    s.n_steps = 200;
    s.metric = MetricChoice::Flat;
  } else if (name == "fig4" || name == "fig5") {
    s.L = 250;
    s.n_sites = 200;
    s.n_steps = 800;
    s.metric = MetricChoice::StaticRindlerLike;
    if (name == "fig5") {
      s.gauge = true;
      s.xi1 = Expression::parse("1000 * x * t");
      s.lambda1 = Expression::parse("0.03 * x");
    }
  } else if (name == "fig1" || name == "fig2") {
    s.L = 150;
    s.n_sites = 400;
    s.n_steps = 200;
    s.metric = MetricChoice::NonstaticTrig;
    s.notes.push_back(
        "lattice size and step count follow the figure caption; L = 150 follows the non-static text");
    if (name == "fig1") {
      s.gauge = true;
      s.xi1 = Expression::parse("1000 * x * t");
      s.lambda1 = Expression::parse("0.03 * x");
    }
  } else {
    throw ValidationError("unknown builtin scenario '" + std::string(name) + "'");
  }
  s.validate();
  return s;
}

ScenarioWalk build_walk(const ScenarioSpec& spec) {
  spec.validate();
  const Lattice lat = make_lattice(spec.n_sites, spec.spacing());
  const double a = spec.spacing();
  const double tau = a / kLightSpeed;
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(spec.n_steps));
  for (int k = 0; k < spec.n_steps; ++k) times.push_back(k * tau);

  const MetricSpec metric = metric_of(spec);
  CoinPair coins = spec.metric == MetricChoice::NonstaticTrig ? trig_coins(spec.mass)
                                                               : metric_to_coin(metric, lat, {}, times);
  if (spec.gauge) {
    coins.coin1.xi = spec.xi1.field(a);
    coins.coin1.dxi = spec.xi1.derivative(Variable::X).field(a);
    coins.coin1.lambda = spec.lambda1.field(a);
  }

  const std::array<Complex, 2> amps = spec.coin;
  ScenarioWalk w{StepBuilder{coins.coin1, coins.coin2, lat, spec.mode},
                 initial_state(amps, lat.origin_index() + spec.initial_site, lat), std::nullopt};
  if (spec.metric == MetricChoice::StaticRindlerLike) {
    w.linear_cone = true;
    w.cone_offset = 5.0 * a;
  }
  w.cone_metric = metric;
  return w;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  try {
    ScenarioWalk walk = build_walk(spec);
    const Lattice& lat = walk.builder.lattice;
    EvolveOptions opts;
    opts.scenario = spec.name;
    opts.mass = spec.mass;
    ScenarioResult r{spec, lat, evolve(walk.builder, walk.initial, spec.n_steps, opts), {}, {}};
    ScenarioSummary& s = r.summary;
    s.max_norm_drift = r.trajectory.metadata.max_norm_drift;
    s.first_wrap_step = r.trajectory.metadata.first_wrap_step;
    s.warnings = r.trajectory.metadata.warnings;
    const auto& last = r.trajectory.profiles.back();
    s.final_ipr = inverse_participation_ratio(last);
    for (int j = 0; j < lat.n_sites(); ++j)
      if (lat.position(j) >= 0.0) s.final_mass_right += last[static_cast<std::size_t>(j)];

    // Causal cone from the starting position, with half a site of slack.
    const double x0 = lat.position(lat.origin_index() + spec.initial_site);
    try {
      for (double t : r.trajectory.times) {
        if (spec.metric == MetricChoice::Flat) r.cone.push_back({x0 - kLightSpeed * t, x0 + kLightSpeed * t});
        else if (walk.linear_cone) r.cone.push_back(linear_light_cone(x0, t, walk.cone_offset));
        else r.cone.push_back(light_cone_boundary(x0, t, *walk.cone_metric));
      }
    } catch (const std::exception& e) {
      r.cone.clear();
      s.warnings.push_back(std::string("light cone unavailable: ") + e.what());
    }
    if (!r.cone.empty()) {
      const double slack = 0.5 * lat.spacing();
      double worst = 0.0, final_out = 0.0;
      for (std::size_t k = 0; k < r.cone.size(); ++k) {
        double out = 0.0;
        for (int j = 0; j < lat.n_sites(); ++j) {
          const double x = lat.position(j);
          if (x < r.cone[k].left - slack || x > r.cone[k].right + slack)
            out += r.trajectory.profiles[k][static_cast<std::size_t>(j)];
        }
        worst = std::max(worst, out);
        final_out = out;
      }
      s.max_outside_cone = worst;
      s.final_outside_cone = final_out;
    }
    s.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  } catch (const DomainError& e) {
    throw DomainError("scenario '" + spec.name + "': " + e.what(), e.site(), e.x(), e.t());
  }
}

void write_probability_csv(std::ostream& out, const ScenarioResult& result) {
  const Lattice& lat = result.lattice;
  std::string buf = "step,site_index,x,p\n";
  buf.reserve(buf.size() + result.trajectory.profiles.size() * static_cast<std::size_t>(lat.n_sites()) * 48);
  for (std::size_t k = 1; k < result.trajectory.profiles.size(); ++k) {
    const auto& prof = result.trajectory.profiles[k];
    for (int j = 0; j < lat.n_sites(); ++j) {
      buf += std::to_string(k);
      buf += ',';
      buf += std::to_string(j);
      buf += ',';
      write_double(buf, lat.position(j));
      buf += ',';
      write_double(buf, prof[static_cast<std::size_t>(j)]);
      buf += '\n';
    }
  }
  out << buf;
}

void write_light_cone_csv(std::ostream& out, const ScenarioResult& result) {
  std::string buf = "step,t,left,right\n";
  for (std::size_t k = 0; k < result.cone.size(); ++k) {
    buf += std::to_string(k);
    buf += ',';
    write_double(buf, result.trajectory.times[k]);
    buf += ',';
    write_double(buf, result.cone[k].left);
    buf += ',';
    write_double(buf, result.cone[k].right);
    buf += '\n';
  }
  out << buf;
}

void write_gnuplot_script(std::ostream& out, const ScenarioResult& result) {
  const ScenarioSpec& s = result.spec;
  out << "# gnuplot -p plot.gp\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 900,700\n"
      << "set output '" << s.name << ".png'\n"
      << "set title '" << s.name << ": L = " << s.L << ", " << s.n_sites << " sites, " << s.n_steps
      << " steps, m = " << s.mass << "'\n"
      << "set xlabel 'x'\n"
      << "set ylabel 'step'\n"
      << "set cblabel 'p(x, step)'\n"
      << "set palette rgbformulae 33,13,10\n"
      << "set key off\n";
  out << "plot 'probability.csv' every ::1 using 3:1:4 with image";
  if (s.outputs.light_cone && !result.cone.empty())
    out << ", \\\n     'light_cone.csv' every ::1 using 3:1 with lines lc rgb 'white' dt 2"
        << ", \\\n     'light_cone.csv' every ::1 using 4:1 with lines lc rgb 'white' dt 2";
  out << "\n";
}

std::string summary_json(const ScenarioResult& result) {
  const ScenarioSpec& s = result.spec;
  const ScenarioSummary& m = result.summary;
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["L"] = s.L;
  j["sites"] = s.n_sites;
  j["steps"] = s.n_steps;
  j["mass"] = s.mass;
  j["metric"] = to_string(s.metric);
  j["gauge"] = s.gauge;
  if (s.gauge) {
    j["xi1"] = s.xi1.to_string();
    j["lambda1"] = s.lambda1.to_string();
  }
  j["mode"] = s.mode == StepMode::Modified ? "modified" : "conventional";
  j["max_norm_drift"] = m.max_norm_drift;
  j["first_wrap_step"] = m.first_wrap_step;
  j["final_inverse_participation_ratio"] = m.final_ipr;
  j["final_mass_right"] = m.final_mass_right;
  if (m.max_outside_cone) j["max_outside_cone"] = *m.max_outside_cone;
  if (m.final_outside_cone) j["final_outside_cone"] = *m.final_outside_cone;
  j["runtime_seconds"] = m.runtime_seconds;
  j["warnings"] = m.warnings;
  j["notes"] = s.notes;
  return j.dump(2) + "\n";
}

void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const OutputSelection& o = result.spec.outputs;
  auto open = [&](const char* file) {
    std::ofstream f(dir / file, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + (dir / file).string());
    return f;
  };
  if (o.probability) {
    auto f = open("probability.csv");
    write_probability_csv(f, result);
  }
  if (o.light_cone && !result.cone.empty()) {
    auto f = open("light_cone.csv");
    write_light_cone_csv(f, result);
  }
  if (o.gnuplot && o.probability) {
    auto f = open("plot.gp");
    write_gnuplot_script(f, result);
  }
  if (o.summary) {
    auto f = open("summary.json");
    f << summary_json(result);
  }
}

std::vector<ScenarioResult> run_batch(const std::vector<ScenarioSpec>& specs,
                                      const std::filesystem::path& out_root) {
  std::set<std::string> names;
  for (const auto& s : specs)
    if (!names.insert(s.name).second) throw ValidationError("duplicate scenario name '" + s.name + "' in batch");
  std::vector<std::future<ScenarioResult>> jobs;
  jobs.reserve(specs.size());
  for (const auto& s : specs)
    jobs.push_back(std::async(std::launch::async, [&s, &out_root] {
      ScenarioResult r = run_scenario(s);
      write_artifacts(r, out_root / s.name);
      return r;
    }));
  std::vector<ScenarioResult> out;
  out.reserve(specs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace sdqw
