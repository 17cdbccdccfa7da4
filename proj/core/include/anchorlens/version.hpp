#pragma once

namespace anchorlens {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace anchorlens
