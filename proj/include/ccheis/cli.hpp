#pragma once

#include <ostream>

namespace ccheis {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,
    kExitNumerical = 2,
    kExitVerification = 3,
};

/// Runs `ccheis <command> ...`; results go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ccheis
