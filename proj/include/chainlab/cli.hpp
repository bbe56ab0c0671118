#pragma once

#include <iosfwd>

namespace chainlab {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitParseError = 2,
  kExitDomainError = 3,
};

/// Entry point behind the `chainlab` executable. Subcommands: simulate,
/// verify, spectrum, saddle, sweep, density.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chainlab
