#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qmimo::cli {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured values
};

/// Invariant suites run by `qmimo validate`.
std::vector<SuiteResult> run_validation(std::uint64_t master_seed);

}  // namespace qmimo::cli
