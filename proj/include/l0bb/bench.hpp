#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "l0bb/relax.hpp"

namespace l0bb::bench {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Seed s of the 60-instance oracle suite: 30 x 12, loss s % 3, penalty
/// (s / 3) % 4 over {BigM, BigML2, L1L2, PowerP(2)}, lambda = 0.1 lambda_max.
Problem oracle_instance(std::uint64_t seed);

CheckResult check_oracle_suite();
CheckResult check_param_table();
CheckResult check_special_cases();
CheckResult check_calculus();
CheckResult check_weak_duality();
CheckResult check_path();
CheckResult check_mixture();
CheckResult check_determinism();

struct NamedCheck {
  std::string name;
  std::function<CheckResult()> run;
};

const std::vector<NamedCheck>& all_checks();

/// Runs the checks whose name contains `filter` (all when empty), printing
/// one PASS/FAIL line per check as it finishes.
std::vector<CheckResult> run(std::ostream& out, const std::string& filter = "");

}  // namespace l0bb::bench
