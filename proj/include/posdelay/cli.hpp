#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace posdelay {

/// Exit statuses of the command-line tool.
enum ExitStatus : int { kExitOk = 0, kExitViolation = 1, kExitUsage = 2 };

/// Runs one subcommand. `args` excludes the program name. The human-readable
/// summary goes to `out`, diagnostics to `err`, and the CSV report to the
/// path given by --output (default: <system stem>.<command>.csv).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace posdelay
