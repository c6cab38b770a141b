#pragma once

namespace pensim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pensim
