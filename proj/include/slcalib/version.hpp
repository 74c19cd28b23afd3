#pragma once

namespace slcalib {

inline constexpr const char* version = "0.1.0";

}  // namespace slcalib
