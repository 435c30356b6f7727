#pragma once

namespace clockcast {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace clockcast
