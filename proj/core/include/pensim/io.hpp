#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pensim {

// All floating-point artifact output goes through this: 12 significant digits.
std::string format_g12(double value);

// FNV-1a 64-bit content hash, used in run manifests.
std::uint64_t fnv1a64(std::string_view data);

std::string hex64(std::uint64_t value);

}  // namespace pensim
