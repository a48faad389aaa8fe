#pragma once

namespace fkl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fkl
