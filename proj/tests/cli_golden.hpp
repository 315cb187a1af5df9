#pragma once

#include "cli_cases.hpp"

#include <string>

namespace autofill::test {

struct CliResult {
  int exit_code = 0;
  /// stdout, then "--- stderr" and stderr when non-empty, then "--- exit N".
  std::string transcript;
};

/// Runs the CLI in-process from the source tree root.
CliResult run_cli_case(const CliCase &c);

std::string golden_path(const CliCase &c);

/// Compares against the stored golden file; with AUTOFILL_UPDATE_GOLDEN set
/// in the environment, rewrites it instead. Empty string on match, otherwise
/// a description of the mismatch.
std::string check_golden(const CliCase &c);

} // namespace autofill::test
