#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace osmosis::csv {

/// Fixed six-decimal rendering used by every report file.
inline std::string fixed6(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

}  // namespace osmosis::csv
