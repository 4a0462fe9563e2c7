#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace coagfuse {

/// Shortest decimal string that round-trips through IEEE-754 double.
inline std::string fmt_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string fmt_u64(std::uint64_t x) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace coagfuse
