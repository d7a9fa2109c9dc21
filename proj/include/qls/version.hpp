#pragma once

namespace qls {

inline constexpr const char* kToolName = "qls";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace qls
