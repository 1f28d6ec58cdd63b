#pragma once

namespace islab {
inline constexpr const char* kVersion = "0.1.0";
}
