// Command-line front end: scenario runs, verification battery, Pauli decompositions.
#include "sdqw/qubit.hpp"
#include "sdqw/scenario.hpp"
#include "sdqw/verification.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sdqw;

namespace {

int run_command(const std::vector<std::string>& configs, const std::vector<std::string>& builtins,
                const fs::path& out, bool seedless) {
  std::vector<ScenarioSpec> specs;
  for (const auto& c : configs) specs.push_back(load_config(c));
  for (const auto& b : builtins) {
    if (b == "all") {
      for (const auto& name : builtin_names()) specs.push_back(builtin_scenario(name));
    } else {
      specs.push_back(builtin_scenario(b));
    }
  }
  if (specs.empty()) {
    std::cerr << "run: give a config file or --builtin\n";
    return 2;
  }

  const auto results = run_batch(specs, out);
  int status = 0;
  for (const auto& r : results) {
    const auto& s = r.summary;
    std::cout << r.spec.name << ": " << r.spec.n_steps << " steps x " << r.spec.n_sites << " sites in "
              << s.runtime_seconds << " s, norm drift " << s.max_norm_drift << ", final IPR " << s.final_ipr
              << " -> " << (out / r.spec.name).string() << "\n";
    for (const auto& w : s.warnings) std::cout << "  warning: " << w << "\n";
    if (s.max_norm_drift > 1e-10) status = 1;
  }

  if (seedless) {
    for (const auto& r : results) {
      std::ostringstream first, again;
      write_probability_csv(first, r);
      write_probability_csv(again, run_scenario(r.spec));
      const bool same = first.str() == again.str();
      std::cout << (same ? "PASS" : "FAIL") << " determinism " << r.spec.name << "\n";
      if (!same) status = 1;
    }
  }
  return status;
}

int verify_command(bool full, const std::string& json_path) {
  const VerificationReport rep =
      run_verification_suite(full ? VerificationLevel::Full : VerificationLevel::Quick);
  std::cout << rep.to_text();
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    f << rep.to_json();
  }
  return rep.all_passed() ? 0 : 1;
}

int decompose_command(int n_qubits, const std::string& direction, const fs::path& out) {
  std::vector<std::pair<std::string, ShiftDirection>> dirs;
  if (direction == "plus" || direction == "both") dirs.emplace_back("plus", ShiftDirection::Plus);
  if (direction == "minus" || direction == "both") dirs.emplace_back("minus", ShiftDirection::Minus);
  int status = 0;
  for (const auto& [name, d] : dirs) {
    const PauliDecomposition dec = shift_with_coin(n_qubits, d);
    const CMatrix direct = build_shift(Lattice(1 << n_qubits, 1.0, 0), d, 2).matrix;
    const double err = max_abs(dec.reconstruct() - direct);
    if (out.empty()) {
      std::cout << "# shift " << name << ", coin + " << n_qubits << " position qubits, " << dec.terms.size()
                << " terms, reconstruction error " << err << "\n";
      write_text(std::cout, dec);
    } else {
      fs::create_directories(out);
      std::ofstream f(out / ("shift_" + name + ".txt"));
      write_text(f, dec);
      std::cout << "shift " << name << ": " << dec.terms.size() << " terms, reconstruction error " << err << " -> "
                << (out / ("shift_" + name + ".txt")).string() << "\n";
    }
    if (!(err < 1e-12)) status = 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-step quantum walk simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run scenarios from config files or builtins");
  std::vector<std::string> configs, builtins;
  bool seedless = false;
  std::string run_out = "out";
  run->add_option("config", configs, "Scenario config files")->check(CLI::ExistingFile);
  run->add_option("--builtin", builtins, "Builtin scenario (fig1..fig5 or all)")
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5", "all"}));
  run->add_option("--out", run_out, "Output directory")->capture_default_str();
  run->add_flag("--seedless", seedless, "Rerun each scenario and assert byte-identical CSV");

  auto* verify = app.add_subcommand("verify", "Run the verification battery");
  bool quick = false, full = false;
  std::string json_path;
  auto* q = verify->add_flag("--quick", quick, "Unitarity, norm and qubit identities (default)");
  verify->add_flag("--full", full, "Every acceptance check")->excludes(q);
  verify->add_option("--json", json_path, "Write the machine-readable report here");

  auto* dec = app.add_subcommand("decompose", "Pauli decomposition of the coin-controlled shifts");
  int n_qubits = 2;
  std::string direction = "both";
  std::string dec_out;
  dec->add_option("--qubits", n_qubits, "Position qubits")->required()->check(CLI::Range(1, 6));
  dec->add_option("--direction", direction, "plus, minus or both")
      ->check(CLI::IsMember({"plus", "minus", "both"}));
  dec->add_option("--out", dec_out, "Write shift_<direction>.txt files here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(configs, builtins, run_out, seedless);
    if (*verify) return verify_command(full, json_path);
    if (*dec) return decompose_command(n_qubits, direction, dec_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
