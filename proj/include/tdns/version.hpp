#pragma once

namespace tdns {

inline constexpr const char* version_string = "tdns 0.1.0";

}
