#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shufflesgd::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

// Parses `args` (without the program name) and runs the chosen subcommand.
// Primary output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shufflesgd::cli
