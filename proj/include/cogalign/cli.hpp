#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cogalign {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitEndpoint = 3;

/// Entry point for the command-line tool; `args` excludes the program name.
/// Errors are reported as one line on `err` and mapped to the exit codes above.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cogalign
