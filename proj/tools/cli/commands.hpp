#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmimo::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSimulationFailure = 3,
  kInfeasibleBudget = 4,
  kValidationFailure = 5,
};

/// Entry point shared by the executable and the in-process tests.
/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace qmimo::cli
