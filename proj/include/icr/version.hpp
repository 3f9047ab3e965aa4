#pragma once

namespace icr {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace icr
