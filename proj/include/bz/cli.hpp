#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bz {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitVerificationFailed = 1, kExitUsage = 2 };

/// Entry point of the `bzwell` tool; args excludes the program name.
/// Subcommands: analyze, simulate, verify, trap-time, sweep.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bz
