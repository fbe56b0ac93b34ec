#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ripsel::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNumericalFailure = 1,
  kValidationError = 2,
  kVerificationFailed = 3,
};

/// Runs one command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ripsel::cli
