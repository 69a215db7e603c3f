#pragma once

namespace relaystab {
inline constexpr const char* kVersion = "0.1.0";
}
