#pragma once

// The acceptance battery: seeded property checks over generated instances,
// shared by the `suite` command and the acceptance test.

#include <cstdint>
#include <string>
#include <vector>

#include "colligo/tolerances.hpp"

namespace colligo {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct SuiteOptions {
  Tolerances tol;
  std::uint64_t seed = 1;
  bool parallel = true;
};

/// Runs every criterion (concurrently when requested); results are ordered by
/// id regardless of completion order.
std::vector<CriterionResult> run_acceptance_suite(const SuiteOptions& options);

/// Runs one criterion, 1-based.
CriterionResult run_criterion(int id, const SuiteOptions& options);

constexpr int kCriterionCount = 10;

}  // namespace colligo
