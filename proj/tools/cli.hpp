#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace unfold::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 2;
inline constexpr int kExitUsage = 64;

/// Parses args (without the program name), runs the subcommand and returns
/// the exit code: 0 success, 2 domain/solver/IO failure, 64 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unfold::cli
