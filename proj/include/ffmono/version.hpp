#pragma once

namespace ffmono {
inline constexpr const char* version = "0.1.0";
}
