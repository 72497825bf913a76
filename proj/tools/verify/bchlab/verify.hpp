#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bchlab::verify {

// One measured quantity compared against a target. `passed` is decided by
// the criterion; measured/target/tolerance are for the report.
struct Check {
  std::string invariant;
  bool passed = false;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  double budget_seconds = 0.0;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] const Check* first_failure() const;
};

struct SuiteOptions {
  // Shorter stability horizons (T = 5 instead of 20); thresholds unchanged.
  bool fast = false;
  unsigned jobs = 1;
  std::uint64_t seed = 12345;
};

inline constexpr int criterion_count = 9;

/// Runs criterion id in 1..9; the runtime budget is appended as a check.
[[nodiscard]] CriterionResult run_criterion(int id, const SuiteOptions& options);

/// Runs the listed criteria (all of them when ids is empty) in order.
[[nodiscard]] std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                                     std::span<const int> ids = {});

/// "criterion 5 FAIL  <title>  (12.3 s)" followed, on failure, by the first
/// violated invariant.
[[nodiscard]] std::string summary_line(const CriterionResult& result);

}  // namespace bchlab::verify
