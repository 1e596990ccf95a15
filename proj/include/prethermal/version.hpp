#pragma once

namespace prethermal {
inline constexpr const char* kVersion = "0.1.0";
}
