#pragma once

#include <string>
#include <vector>

namespace reachsynth {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,  // unexpected internal failure
  kExitConfig = 2,
  kExitCoverage = 3,
  kExitInfeasible = 4,
  kExitBudget = 5,
};

/// Parses and runs one command (simulate, identify, check, synth, reach). Never throws.
int run_cli(int argc, const char* const* argv);
/// Same, with args[0] as the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace reachsynth
