#ifndef TRELLIP_HASH_HPP
#define TRELLIP_HASH_HPP

#include <cstdint>
#include <cstring>

namespace trellip {

// FNV-1a 64-bit, used for content digests of sampling specs.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 14695981039346656037ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(double v, std::uint64_t h) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  return fnv1a(&bits, sizeof(bits), h);
}

}  // namespace trellip

#endif  // TRELLIP_HASH_HPP
