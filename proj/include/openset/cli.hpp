#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace openset {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `openset` tool. args[0] is the program name.
/// Subcommands: fit, score, threshold, eval, ablate.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace openset
