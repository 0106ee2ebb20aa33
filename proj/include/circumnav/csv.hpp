#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace circumnav {

// Shortest round-trip decimal form, so CSV values reload bit-exactly and
// reruns diff clean.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fixed 6 decimals, used for the time column.
inline std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", t);
  return buf;
}

}  // namespace circumnav
