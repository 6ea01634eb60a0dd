#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "qfem/errors.hpp"

namespace qfem {

// Shortest decimal form that parses back to the identical double.
// All on-disk text formats go through these two so round-trips are
// bit-exact.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("malformed numeric field: '" + std::string(s) + "'");
  }
  return v;
}

inline long parse_long(std::string_view s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("malformed integer field: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace qfem
