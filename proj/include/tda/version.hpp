#pragma once

namespace tda {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tda
