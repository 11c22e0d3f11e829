#pragma once

namespace rsmhp {
inline constexpr const char* kVersion = "0.1.0";
}
