#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace ssctm {

// Round-trip-safe float formatting for emitted artifacts (17 significant
// digits).  Not locale dependent.
inline std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Compact human-facing formatting for summary lines.
inline std::string fmt_g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// JSON number token: finite values as %.17g, non-finite as null (JSON has
// no representation for them).
inline std::string json_number(double x) {
  if (!std::isfinite(x)) return "null";
  return fmt_g17(x);
}

}  // namespace ssctm
