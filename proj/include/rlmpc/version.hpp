#pragma once

#include <string_view>

namespace rlmpc {

inline constexpr std::string_view kToolName = "rlmpc";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace rlmpc
