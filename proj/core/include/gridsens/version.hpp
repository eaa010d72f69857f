#pragma once

namespace gridsens {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gridsens
