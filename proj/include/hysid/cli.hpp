#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hysid/error.hpp"

namespace hysid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Usage errors (bad arguments, unknown presets, missing aux inputs) map to
/// 2; everything else to 1.
int exit_code_for(ErrorCode code) noexcept;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hysid::cli
