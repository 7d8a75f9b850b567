#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gaussflow::acceptance {

struct Options {
  int grid_n = 1024;
  double grid_l = 10.0;
  unsigned long long seed = 0;
  int workers = 0;  // 0: hardware concurrency
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs verification items 1-12 and returns one result per item. When log is
/// nonnull, a pass/fail line is printed as each item finishes.
std::vector<CriterionResult> run_all(const Options& opt, std::ostream* log);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace gaussflow::acceptance
