#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdqw {

enum class VerificationLevel { Quick, Full };

// Empty text selects Quick.
VerificationLevel verification_level_from_string(std::string_view s);

struct CheckResult {
  std::string id;           // "1", "7b", ...
  std::string description;
  bool passed = false;
  double measured = 0.0;
  std::string comparison;   // e.g. "< 1e-12", "in [0.8, 1.2]"
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 when unbounded
  std::string detail;
};

struct VerificationReport {
  VerificationLevel level = VerificationLevel::Quick;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::string to_json() const;
  // One "PASS|FAIL <id> ..." line per check.
  std::string to_text() const;
};

// Quick: unitarity, norm conservation and qubit identities.
// Full: every acceptance check, including convergence studies and scenario runs.
VerificationReport run_verification_suite(VerificationLevel level);

// Individual checks, also used by the acceptance binary.
CheckResult check_unitarity();
CheckResult check_norm_conservation();
CheckResult check_qubit_identities();
CheckResult check_dispersion();
CheckResult check_hamiltonian_convergence();
CheckResult check_general_vs_restricted();
CheckResult check_geometry_round_trip();
std::vector<CheckResult> check_scenarios();
std::vector<CheckResult> check_gauge_un();
std::vector<CheckResult> check_two_particle();
CheckResult check_determinism();

}  // namespace sdqw
