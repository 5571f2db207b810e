#pragma once

namespace dts {

inline constexpr const char* version = "0.1.0";

} // namespace dts
