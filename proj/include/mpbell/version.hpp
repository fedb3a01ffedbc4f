#pragma once

namespace mpbell {

inline constexpr const char* kToolName = "mpbell";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace mpbell
