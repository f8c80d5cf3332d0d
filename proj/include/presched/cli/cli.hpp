#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace presched {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,      ///< bad flags, unknown algorithm, invalid parameters
    kExitInfeasible = 2, ///< unreadable or infeasible input, invalid trace
};

/// Runs the tool on argv-style arguments (without the program name).
/// Results go to `out`, log lines to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace presched
