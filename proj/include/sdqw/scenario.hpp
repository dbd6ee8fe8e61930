#pragma once

#include "sdqw/evolution.hpp"
#include "sdqw/expression.hpp"
#include "sdqw/geometry.hpp"

#include <array>
#include <filesystem>
#include <numbers>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdqw {

enum class MetricChoice { Flat, StaticRindlerLike, NonstaticTrig, Custom };

std::string to_string(MetricChoice m);
MetricChoice metric_choice_from_string(std::string_view s);

struct OutputSelection {
  bool probability = true;
  bool summary = true;
  bool light_cone = true;
  bool gnuplot = true;
};

// Lattice spacing and time step are both 1 / L.
struct ScenarioSpec {
  std::string name = "scenario";
  int L = 0;
  int n_sites = 0;
  int n_steps = 0;
  double mass = 0.0;
  MetricChoice metric = MetricChoice::Flat;
  // Custom metric: vielbein components and U(1) potential over (x, t, a).
  Expression e00{1.0}, e11{1.0}, A0, A1;
  // Coin-level U(1) phases on the first coin: xi1(x, t, 0) and lambda1(x, t).
  bool gauge = false;
  Expression xi1, lambda1;
  std::array<Complex, 2> coin{Complex(1.0 / std::numbers::sqrt2, 0.0),
                              Complex(0.0, 1.0 / std::numbers::sqrt2)};
  int initial_site = 0;  // offset from the origin site
  StepMode mode = StepMode::Modified;
  OutputSelection outputs;
  std::vector<std::string> notes;

  double spacing() const { return 1.0 / L; }
  void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Errors carry the line number.
ScenarioSpec parse_config(std::istream& in, const std::string& source = "<config>");
ScenarioSpec load_config(const std::filesystem::path& path);

ScenarioSpec builtin_scenario(std::string_view name);
const std::vector<std::string>& builtin_names();

struct ScenarioWalk {
  StepBuilder builder;
  WalkState initial;
  // Metric whose e11/e00 bounds the causal cone; empty when no cone applies.
  std::optional<MetricSpec> cone_metric;
  double cone_offset = 0.0;  // e11 = x + offset, e00 = 1 (closed-form cone)
  bool linear_cone = false;
};

ScenarioWalk build_walk(const ScenarioSpec& spec);

struct ScenarioSummary {
  double max_norm_drift = 0.0;
  int first_wrap_step = -1;
  double runtime_seconds = 0.0;
  double final_ipr = 0.0;
  double final_mass_right = 0.0;  // probability at x >= 0 after the last step
  // Largest probability outside the causal cone (half-site slack) over all steps.
  std::optional<double> max_outside_cone;
  std::optional<double> final_outside_cone;
  std::vector<std::string> warnings;
};

struct ScenarioResult {
  ScenarioSpec spec;
  Lattice lattice;
  Trajectory trajectory;
  std::vector<LightCone> cone;  // one per profile, empty without a cone
  ScenarioSummary summary;
};

// Domain errors from field evaluation are rethrown with the scenario name prepended.
ScenarioResult run_scenario(const ScenarioSpec& spec);

// "step,site_index,x,p" for steps 1..n_steps.
void write_probability_csv(std::ostream& out, const ScenarioResult& result);
// "step,t,left,right"
void write_light_cone_csv(std::ostream& out, const ScenarioResult& result);
void write_gnuplot_script(std::ostream& out, const ScenarioResult& result);
std::string summary_json(const ScenarioResult& result);

// Writes the selected artifacts into dir (created if needed).
void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir);

// Runs the scenarios concurrently; each writes to out_root / name.
std::vector<ScenarioResult> run_batch(const std::vector<ScenarioSpec>& specs,
                                      const std::filesystem::path& out_root);

}  // namespace sdqw
