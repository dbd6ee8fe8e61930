#include <doctest.h>

#include "sdqw/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sdqw;
using std::numbers::pi;

namespace {

ScenarioSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

ScenarioSpec small_flat() {
  return parse("name = small\nL = 50\nsites = 41\nsteps = 15\nmass = 0.04\nmetric = flat\n");
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "sdqw_scenario_tests" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("builtin scenarios carry the figure parameters") {
  const ScenarioSpec f3 = builtin_scenario("fig3");
  CHECK(f3.L == 250);
  CHECK(f3.n_sites == 400);
  CHECK(f3.n_steps == 200);
  CHECK(f3.metric == MetricChoice::Flat);
  CHECK_FALSE(f3.gauge);
  CHECK(f3.mass == 0.04);

  const ScenarioSpec f4 = builtin_scenario("fig4");
  CHECK(f4.L == 250);
  CHECK(f4.n_sites == 200);
  CHECK(f4.n_steps == 800);
  CHECK(f4.metric == MetricChoice::StaticRindlerLike);

  const ScenarioSpec f1 = builtin_scenario("fig1");
  CHECK(f1.L == 150);
  CHECK(f1.n_sites == 400);
  CHECK(f1.n_steps == 200);
  CHECK(f1.metric == MetricChoice::NonstaticTrig);
  CHECK(f1.gauge);
  CHECK_FALSE(f1.notes.empty());

  CHECK(builtin_scenario("fig5").gauge);
  CHECK_FALSE(builtin_scenario("fig2").gauge);
  CHECK_THROWS_AS(builtin_scenario("fig6"), ValidationError);

  // Initial state (|0> + i|1>)/sqrt(2) at the origin.
  CHECK(std::abs(f3.coin[0] - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);
  CHECK(std::abs(f3.coin[1] - Complex(0, 1 / std::sqrt(2.0))) < 1e-15);
  CHECK(f3.initial_site == 0);
}

TEST_CASE("builtin coin fields reproduce the listed rotation angles and phases") {
  SUBCASE("fig3: theta1 = 0, theta2 = 0.04 / L") {
    const ScenarioWalk w = build_walk(builtin_scenario("fig3"));
    const auto& c1 = std::get<RestrictedCoinField>(w.builder.coin1);
    const auto& c2 = std::get<RestrictedCoinField>(w.builder.coin2);
    const double tau = 1.0 / 250;
    for (double x : {-0.3, 0.0, 0.5}) {
      CHECK(c1.theta(x, 0.2) + tau * c1.vartheta(x, 0.2) == 0.0);
      CHECK(c2.theta(x, 0.2) + tau * c2.vartheta(x, 0.2) == doctest::Approx(0.04 / 250));
      CHECK(c1.xi(x, 0.2) == 0.0);
    }
  }
  SUBCASE("fig4: theta1 = acos(x + 5a) / 2 + tau / (2 sqrt(1 - (x + 5a)^2))") {
    const ScenarioWalk w = build_walk(builtin_scenario("fig4"));
    const auto& c1 = std::get<RestrictedCoinField>(w.builder.coin1);
    const auto& c2 = std::get<RestrictedCoinField>(w.builder.coin2);
    const double a = 1.0 / 250;
    for (double x : {-0.35, -0.02, 0.0, 0.2, 0.39}) {
      const double u = x + 5 * a;
      CHECK(c1.theta(x, 1.0) + a * c1.vartheta(x, 1.0) ==
            doctest::Approx(0.5 * std::acos(u) + 0.5 * a / std::sqrt(1 - u * u)));
      CHECK(c2.theta(x, 1.0) + a * c2.vartheta(x, 1.0) == doctest::Approx(-std::acos(u) + 0.04 * a));
    }
    CHECK(w.linear_cone);
    CHECK(w.cone_offset == doctest::Approx(5 * a));
  }
  SUBCASE("fig5 and fig1: xi1(x, t, tau) = 1000 x t + 0.03 x / L") {
    for (const char* name : {"fig5", "fig1"}) {
      const ScenarioSpec s = builtin_scenario(name);
      const ScenarioWalk w = build_walk(s);
      const auto& c1 = std::get<RestrictedCoinField>(w.builder.coin1);
      const auto& c2 = std::get<RestrictedCoinField>(w.builder.coin2);
      const double tau = 1.0 / s.L;
      for (double x : {-0.3, 0.1, 0.25}) {
        CHECK(c1.xi(x, 0.6) + tau * c1.lambda(x, 0.6) == doctest::Approx(1000 * x * 0.6 + 0.03 * x / s.L));
        CHECK(c1.dxi(x, 0.6) == doctest::Approx(600.0));
        CHECK(c2.xi(x, 0.6) == 0.0);
        CHECK(c2.lambda(x, 0.6) == 0.0);
      }
    }
  }
  SUBCASE("fig2: theta1 = pi/8 + 2x - 2/L, theta2 = -pi/4 - 4x + 0.04 t / L") {
    const ScenarioWalk w = build_walk(builtin_scenario("fig2"));
    const auto& c1 = std::get<RestrictedCoinField>(w.builder.coin1);
    const auto& c2 = std::get<RestrictedCoinField>(w.builder.coin2);
    const double tau = 1.0 / 150;
    for (double x : {-0.4, 0.0, 0.7})
      for (double t : {0.0, 0.5, 1.3}) {
        CHECK(c1.theta(x, t) + tau * c1.vartheta(x, t) == doctest::Approx(pi / 8 + 2 * x - 2.0 / 150));
        CHECK(c2.theta(x, t) + tau * c2.vartheta(x, t) == doctest::Approx(-pi / 4 - 4 * x + 0.04 * t / 150));
        CHECK(c1.xi(x, t) == 0.0);
      }
    CHECK(c1.dtheta(0.1, 0.0) == 2.0);
    CHECK(c2.dtheta(0.1, 0.0) == -4.0);
  }
}

TEST_CASE("config files parse into validated scenarios") {
  const ScenarioSpec s = parse(R"(# curved run with a gauge field
name = curved
L = 250
sites = 200        # lattice points
steps = 40
mass = 0.04
metric = custom
e00 = 1
e11 = x + 5*a
gauge = on
xi1 = 1000*x*t
lambda1 = 0.03*x
coin0_re = 1/sqrt(2)
coin1_im = 1/sqrt(2)
site = 3
mode = modified
outputs = probability, summary
note = first note
note = second note
)");
  CHECK(s.name == "curved");
  CHECK(s.L == 250);
  CHECK(s.n_sites == 200);
  CHECK(s.n_steps == 40);
  CHECK(s.metric == MetricChoice::Custom);
  CHECK(s.gauge);
  CHECK(s.initial_site == 3);
  CHECK(s.outputs.probability);
  CHECK(s.outputs.summary);
  CHECK_FALSE(s.outputs.light_cone);
  CHECK_FALSE(s.outputs.gnuplot);
  CHECK(s.notes.size() == 2);
  CHECK(s.e11.evaluate({0.1, 0, 0, 0, 0.004}) == doctest::Approx(0.12));

  // The custom metric e11 = x + 5a gives the same coins as the builtin static metric.
  const ScenarioWalk custom = build_walk(s);
  ScenarioSpec builtin = builtin_scenario("fig5");
  builtin.n_steps = 40;
  builtin.initial_site = 3;
  const ScenarioWalk ref = build_walk(builtin);
  const auto& a1 = std::get<RestrictedCoinField>(custom.builder.coin1);
  const auto& b1 = std::get<RestrictedCoinField>(ref.builder.coin1);
  const auto& a2 = std::get<RestrictedCoinField>(custom.builder.coin2);
  const auto& b2 = std::get<RestrictedCoinField>(ref.builder.coin2);
  for (double x : {-0.3, 0.0, 0.2}) {
    CHECK(a1.theta(x, 0.1) == doctest::Approx(b1.theta(x, 0.1)));
    CHECK(a1.vartheta(x, 0.1) == doctest::Approx(b1.vartheta(x, 0.1)));
    CHECK(a2.vartheta(x, 0.1) == doctest::Approx(b2.vartheta(x, 0.1)));
    CHECK(a1.xi(x, 0.1) == doctest::Approx(b1.xi(x, 0.1)));
  }
  CHECK(custom.initial.amplitudes() == ref.initial.amplitudes());
}

TEST_CASE("config errors name the line") {
  const std::string base = "L = 10\nsites = 8\nsteps = 2\n";
  CHECK(error_of(base + "colour = red\n").find("test.cfg:4: unknown key 'colour'") != std::string::npos);
  CHECK(error_of("L = 10\nsites 8\n").find("test.cfg:2: expected 'key = value'") != std::string::npos);
  CHECK(error_of(base + "L = 20\n").find("test.cfg:4: duplicate key 'L'") != std::string::npos);
  CHECK(error_of(base + "metric = custom\ne11 = x + \n").find("test.cfg:5") != std::string::npos);
  CHECK(error_of(base + "metric = custom\ne11 = x + \n").find("column") != std::string::npos);
  CHECK(error_of(base + "metric = custom\ne11 = y\n").find("unknown identifier 'y'") != std::string::npos);
  CHECK(error_of(base + "metric = spherical\n").find("test.cfg:4: metric") != std::string::npos);
  CHECK(error_of(base + "mass = x\n").find("expected a constant") != std::string::npos);
  CHECK(error_of(base + "e11 = x1\n").find("x, t and a only") != std::string::npos);
  CHECK(error_of(base + "gauge = maybe\n").find("on/off") != std::string::npos);
  CHECK(error_of(base + "outputs = movie\n").find("unknown output") != std::string::npos);
  CHECK(error_of(base + "steps2 = 3\n").find("unknown key") != std::string::npos);
  CHECK(error_of(base + "name =\n").find("empty value") != std::string::npos);
  CHECK(error_of("L = 10\nsites = 8\n").find("missing required key 'steps'") != std::string::npos);
  CHECK(error_of("L = 0\nsites = 8\nsteps = 2\n").find("L must be a positive integer") != std::string::npos);
  CHECK(error_of("L = 2.5\nsites = 8\nsteps = 2\n").find("expected an integer") != std::string::npos);
  CHECK(error_of(base + "coin0_re = 1\ncoin1_im = 1\n").find("not normalized") != std::string::npos);
  CHECK(error_of(base + "site = 9\n").find("outside the lattice") != std::string::npos);
  CHECK(error_of(base + "e11 = x\n").find("custom metric only") != std::string::npos);
  CHECK(error_of(base + "metric = custom\nA1 = x\ngauge = on\n").find("exclusive") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/scenario.cfg"), ValidationError);
}

TEST_CASE("probability CSV: row count, range and per-step normalization") {
  for (const ScenarioSpec& spec : {small_flat(), [] {
         ScenarioSpec s = builtin_scenario("fig5");
         s.n_steps = 30;
         return s;
       }()}) {
    const ScenarioResult r = run_scenario(spec);
    std::ostringstream out;
    write_probability_csv(out, r);
    const auto rows = csv_rows(out.str());
    REQUIRE(rows.size() == static_cast<std::size_t>(spec.n_steps * spec.n_sites + 1));
    CHECK(rows[0] == std::vector<std::string>{"step", "site_index", "x", "p"});
    std::vector<double> sums(static_cast<std::size_t>(spec.n_steps) + 1, 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      REQUIRE(rows[i].size() == 4);
      const int step = std::stoi(rows[i][0]);
      const int site = std::stoi(rows[i][1]);
      const double x = std::stod(rows[i][2]), p = std::stod(rows[i][3]);
      CHECK(step >= 1);
      CHECK(step <= spec.n_steps);
      CHECK(x == r.lattice.position(site));
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      sums[static_cast<std::size_t>(step)] += p;
    }
    for (int k = 1; k <= spec.n_steps; ++k) CHECK(std::abs(sums[static_cast<std::size_t>(k)] - 1.0) < 1e-10);
    CHECK(r.summary.max_norm_drift < 1e-10);
  }
}

TEST_CASE("identical scenarios give byte-identical CSVs") {
  ScenarioSpec s = builtin_scenario("fig1");
  s.n_steps = 25;
  std::ostringstream a, b;
  write_probability_csv(a, run_scenario(s));
  write_probability_csv(b, run_scenario(s));
  CHECK(a.str() == b.str());
}

TEST_CASE("flat run stays inside the Minkowski cone and is mirror symmetric") {
  const ScenarioResult r = run_scenario(small_flat());
  REQUIRE(r.summary.max_outside_cone.has_value());
  CHECK(*r.summary.max_outside_cone < 1e-14);
  REQUIRE(r.cone.size() == r.trajectory.profiles.size());
  CHECK(r.cone.back().right == doctest::Approx(15.0 / 50));
  const auto& last = r.trajectory.profiles.back();
  const int o = r.lattice.origin_index();
  for (int d = 0; d <= 15; ++d)
    CHECK(last[static_cast<std::size_t>(o + d)] == doctest::Approx(last[static_cast<std::size_t>(o - d)]).epsilon(1e-12));
  CHECK(r.summary.first_wrap_step == -1);
}

TEST_CASE("field domain errors name the scenario") {
  const ScenarioSpec s = parse("name = broken\nL = 10\nsites = 8\nsteps = 2\nmetric = custom\ne11 = 2\n");
  try {
    run_scenario(s);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("scenario 'broken'") != std::string::npos);
    CHECK(e.site() >= 0);
  }
  ScenarioSpec g = builtin_scenario("fig3");
  g.n_steps = 3;
  g.gauge = true;
  g.xi1 = Expression::parse("ln(x)");
  CHECK_THROWS_AS(run_scenario(g), DomainError);
}

TEST_CASE("artifacts and summary") {
  ScenarioSpec s = small_flat();
  const auto dir = scratch_dir("artifacts");
  const ScenarioResult r = run_scenario(s);
  write_artifacts(r, dir);
  for (const char* f : {"probability.csv", "light_cone.csv", "plot.gp", "summary.json"})
    CHECK(std::filesystem::exists(dir / f));

  std::ifstream js(dir / "summary.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["name"] == "small");
  CHECK(j["steps"] == 15);
  CHECK(j["metric"] == "flat");
  CHECK(j.contains("max_norm_drift"));
  CHECK(j.contains("runtime_seconds"));
  CHECK(j["first_wrap_step"] == -1);

  std::ostringstream gp;
  write_gnuplot_script(gp, r);
  CHECK(gp.str().find("'probability.csv'") != std::string::npos);
  CHECK(gp.str().find("'light_cone.csv'") != std::string::npos);

  std::ostringstream cone;
  write_light_cone_csv(cone, r);
  const auto rows = csv_rows(cone.str());
  CHECK(rows.size() == 17);
  CHECK(rows[0] == std::vector<std::string>{"step", "t", "left", "right"});

  // Only the requested outputs are written.
  s.outputs = OutputSelection{true, false, false, false};
  const auto dir2 = scratch_dir("selected");
  write_artifacts(run_scenario(s), dir2);
  CHECK(std::filesystem::exists(dir2 / "probability.csv"));
  CHECK_FALSE(std::filesystem::exists(dir2 / "summary.json"));
  CHECK_FALSE(std::filesystem::exists(dir2 / "plot.gp"));
}

TEST_CASE("curved run reports the wrap step and its cone") {
  ScenarioSpec s = builtin_scenario("fig4");
  s.n_steps = 120;
  const ScenarioResult r = run_scenario(s);
  REQUIRE(r.cone.size() == 121);
  const LightCone exact = linear_light_cone(0.0, 120.0 / 250, 5.0 / 250);
  CHECK(r.cone.back().right == doctest::Approx(exact.right));
  CHECK(r.cone.back().left == doctest::Approx(exact.left));
  // The curved cone is narrower than the flat one.
  CHECK(r.cone.back().right < 120.0 / 250);
  CHECK(r.summary.first_wrap_step == -1);
}

TEST_CASE("batch runs write one directory per scenario") {
  ScenarioSpec a = small_flat();
  ScenarioSpec b = builtin_scenario("fig2");
  b.n_steps = 10;
  const auto root = scratch_dir("batch");
  const auto results = run_batch({a, b}, root);
  REQUIRE(results.size() == 2);
  CHECK(std::filesystem::exists(root / "small" / "probability.csv"));
  CHECK(std::filesystem::exists(root / "fig2" / "probability.csv"));
  // Concurrent output equals a serial run.
  std::ostringstream serial;
  write_probability_csv(serial, run_scenario(b));
  std::ifstream f(root / "fig2" / "probability.csv");
  const std::string batch((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(batch == serial.str());

  CHECK_THROWS_AS(run_batch({a, a}, root), ValidationError);
}
