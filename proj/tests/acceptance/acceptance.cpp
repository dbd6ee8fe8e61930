// One PASS/FAIL line per acceptance check; exit status 1 if any fails.
#include "sdqw/verification.hpp"

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace sdqw;

int main(int argc, char** argv) {
  std::string json_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--json") json_path = argv[i + 1];

  const std::vector<std::function<std::vector<CheckResult>()>> battery{
      [] { return std::vector{check_unitarity()}; },
      [] { return std::vector{check_qubit_identities()}; },
      [] { return std::vector{check_dispersion()}; },
      [] { return std::vector{check_hamiltonian_convergence()}; },
      [] { return std::vector{check_general_vs_restricted()}; },
      [] { return std::vector{check_geometry_round_trip()}; },
      [] { return check_scenarios(); },
      [] { return check_gauge_un(); },
      [] { return check_two_particle(); },
      [] { return std::vector{check_determinism()}; },
  };

  VerificationReport rep;
  rep.level = VerificationLevel::Full;
  for (const auto& run : battery) {
    VerificationReport part;
    part.checks = run();
    std::cout << part.to_text() << std::flush;
    for (auto& c : part.checks) rep.checks.push_back(std::move(c));
  }

  int failed = 0;
  for (const auto& c : rep.checks) failed += c.passed ? 0 : 1;
  std::cout << (rep.checks.size() - failed) << "/" << rep.checks.size() << " checks passed\n";
  if (!json_path.empty()) {
    if (std::FILE* f = std::fopen(json_path.c_str(), "w")) {
      std::fputs(rep.to_json().c_str(), f);
      std::fclose(f);
    }
  }
  return failed == 0 ? 0 : 1;
}
