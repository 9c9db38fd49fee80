#pragma once

namespace qoi {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qoi
