#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace autofill::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kNotFilled = 1,
  kInputError = 2,
  kTooLarge = 3,
  kBindFailure = 4,
};

/// Runs one invocation. `args[0]` is the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace autofill::cli
