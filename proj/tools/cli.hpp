#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arreg::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInput = 2,
  kRuntime = 3,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arreg::cli
