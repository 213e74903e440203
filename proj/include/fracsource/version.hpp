#pragma once

namespace fracsource {

inline constexpr const char* kVersion = "0.1.0";

}
