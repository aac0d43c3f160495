#pragma once

#define TVMAX_VERSION_MAJOR 0
#define TVMAX_VERSION_MINOR 1
#define TVMAX_VERSION_PATCH 0

namespace tvmax {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tvmax
