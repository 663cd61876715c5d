#pragma once

namespace reslat {

inline constexpr const char* kVersion = "0.1.0";

}
