#pragma once

#include <string>

namespace rem::log {

enum class Level { off = 0, error = 1, warn = 2, info = 3, debug = 4 };

// Parsed once from the REM_LOG environment variable
// (off|error|warn|info|debug, default warn).
Level level();

void warn(const std::string& code, const std::string& message);
void info(const std::string& message);
void debug(const std::string& message);

// Stable warning codes, mirrored in structured diagnostics.
inline constexpr const char* w_empty_unit = "W_EMPTY_UNIT";
inline constexpr const char* w_grid_cap_below_max = "W_GRID_CAP_BELOW_MAX";
inline constexpr const char* w_extrapolation = "W_EXTRAPOLATION";
inline constexpr const char* w_two_step_excluded = "W_TWO_STEP_EXCLUDED";

}  // namespace rem::log
