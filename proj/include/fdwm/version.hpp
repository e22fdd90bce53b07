#pragma once

namespace fdwm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fdwm
