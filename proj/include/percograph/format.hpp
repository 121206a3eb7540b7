#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace percograph {

/// Fixed 12-significant-digit rendering used by every CSV writer, so reruns are
/// byte-identical.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// CSV schema version written in the header comment of every output file.
inline constexpr int kCsvSchemaVersion = 1;

}  // namespace percograph
