#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gapboot::cli {

/// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_runtime = 2;

/// Runs one invocation; `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gapboot::cli
