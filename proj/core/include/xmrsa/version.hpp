#pragma once

namespace xmrsa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace xmrsa
