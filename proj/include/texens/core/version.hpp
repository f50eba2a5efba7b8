#pragma once

namespace texens {
inline constexpr const char* version = "0.1.0";
}
