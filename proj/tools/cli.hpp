#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specoarse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args excludes the program name). Diagnostics go
/// to `err`, informational output to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specoarse::cli
