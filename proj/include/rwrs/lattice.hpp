#pragma once

#include <cstdint>

namespace rwrs {

// Lattice sites are carried as packed 64-bit keys. d=1 sites are the signed
// coordinate itself; d=2 sites pack two signed 32-bit coordinates.
struct Site {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

inline std::uint64_t pack_site_1d(std::int64_t x) {
  return static_cast<std::uint64_t>(x);
}

inline std::uint64_t pack_site_2d(std::int32_t x, std::int32_t y) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
}

inline std::uint64_t pack_site(int dimension, Site s) {
  return dimension == 1 ? pack_site_1d(s.x)
                        : pack_site_2d(static_cast<std::int32_t>(s.x),
                                       static_cast<std::int32_t>(s.y));
}

inline Site unpack_site(int dimension, std::uint64_t key) {
  if (dimension == 1) return {static_cast<std::int64_t>(key), 0};
  return {static_cast<std::int32_t>(key >> 32),
          static_cast<std::int32_t>(key & 0xffffffffull)};
}

}  // namespace rwrs
