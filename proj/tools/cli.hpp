#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hrma::cli {

/// Exit codes: 0 success, 1 an internal invariant check failed,
/// 2 usage or config error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;

/// Runs the driver on argv-style arguments (args[0] is the program name).
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hrma::cli
