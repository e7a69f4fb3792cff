#pragma once

namespace semshape {

inline constexpr const char* kToolName = "semshape";
inline constexpr const char* kToolVersion = "0.1.0";

}
