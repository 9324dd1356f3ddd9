#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace loopaccel {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitAnalysisFailed = 1,
  kExitInputError = 2,
  kExitSolverError = 3,
};

// Entry point of the loop-accel tool; argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace loopaccel
