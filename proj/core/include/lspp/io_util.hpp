#ifndef LSPP_IO_UTIL_HPP_
#define LSPP_IO_UTIL_HPP_

#include <cstdint>
#include <cstdio>
#include <string>

namespace lspp {

/// Round-trip decimal text for doubles; used by every CSV writer so that
/// regenerated files are byte-identical.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fnv1a_hex(const std::string& data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(data)));
  return buf;
}

}  // namespace lspp

#endif  // LSPP_IO_UTIL_HPP_
