#pragma once

#include <cstdio>
#include <string>

namespace latblock {

/// Shortest-roundtrip-safe decimal text (17 significant digits).
inline std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace latblock
