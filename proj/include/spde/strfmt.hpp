#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>

// Small deterministic formatting helpers (the toolchain's std::format
// is not available).

namespace spde {

/// shortest round-trip decimal rendering of a double
inline std::string num_str(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[v & 0xf];
    v >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

/// join stream-formattable pieces into a string
template <typename... Ts>
std::string cat(const Ts&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

}  // namespace spde
