#pragma once

namespace sfl {

inline constexpr const char* kVersion = "0.1.0";

}
