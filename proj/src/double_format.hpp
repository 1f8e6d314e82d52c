#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace ellband::detail {

// Shortest round-trip formatting; fast enough for million-row outputs and
// byte-stable across runs.
inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_json_number(std::string& out, double v) {
  if (std::isfinite(v)) {
    append_double(out, v);
  } else {
    out += "null";
  }
}

}  // namespace ellband::detail
