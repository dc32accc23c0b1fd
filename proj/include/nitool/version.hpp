#pragma once

namespace nitool {

inline constexpr const char* kToolName    = "nitool";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace nitool
