#pragma once

#include <iosfwd>

namespace qtd {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitIntegration = 3 };

/// Parses argv, dispatches one subcommand and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtd
