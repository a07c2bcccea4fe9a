#pragma once

namespace cpmri {

inline constexpr const char* version = "0.1.0";

} // namespace cpmri
