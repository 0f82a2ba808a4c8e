#pragma once

#include <functional>
#include <string>
#include <vector>

namespace willmore {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity compared against tolerance
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyOptions {
  int threads = 1;
  std::vector<int> only;  // empty runs every criterion
};

// Runs the acceptance criteria in order; on_result fires after each one.
std::vector<CriterionResult> run_acceptance(
    const VerifyOptions& opts,
    const std::function<void(const CriterionResult&)>& on_result = {});

int acceptance_count();

}  // namespace willmore
