#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rwrs {

// Counter-mode pseudo-random machinery. Every random quantity in the toolkit
// is a pure function of (key, counter), so trials and scenery sites can be
// evaluated in any order, on any number of threads, with identical results.

namespace detail {

constexpr std::uint64_t kPhiloxMul = 0xD2B74407B1CE6E93ull;
constexpr std::uint64_t kPhiloxWeyl = 0x9E3779B97F4A7C15ull;

struct U128 {
  std::uint64_t hi;
  std::uint64_t lo;
};

inline U128 mul_wide(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
}

}  // namespace detail

// Philox 2x64, 10 rounds. Maps a 128-bit counter (c0,c1) and a 64-bit key to
// two 64-bit words.
inline std::array<std::uint64_t, 2> philox2x64(std::uint64_t c0, std::uint64_t c1,
                                               std::uint64_t key) {
  for (int r = 0; r < 10; ++r) {
    detail::U128 p = detail::mul_wide(c0, detail::kPhiloxMul);
    c0 = p.hi ^ key ^ c1;
    c1 = p.lo;
    key += detail::kPhiloxWeyl;
  }
  return {c0, c1};
}

// 128-bit stream identity: a key plus a lane word that seeds the high half of
// the counter. Distinct (master, a, b) triples give independent streams.
struct StreamId {
  std::uint64_t key;
  std::uint64_t lane;
};

inline StreamId derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  auto words = philox2x64(a, b, master);
  return {words[0], words[1]};
}

// Buffered generator over one stream. Cheap to construct; state is two words
// plus buffers.
class Rng {
 public:
  Rng() : Rng(StreamId{0, 0}) {}
  explicit Rng(StreamId id) : key_(id.key), lane_(id.lane) {}
  Rng(std::uint64_t master, std::uint64_t a, std::uint64_t b)
      : Rng(derive_stream(master, a, b)) {}

  std::uint64_t next_u64() {
    if (have_ == 0) {
      auto words = philox2x64(ctr_++, lane_, key_);
      buf_ = words;
      have_ = 2;
    }
    return buf_[--have_];
  }

  // Uniform on the open interval (0,1): (k + 1/2) * 2^-53 with k on 53 bits.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Low-cost small draws from a bit buffer.
  std::uint64_t next_bits(int nbits) {
    if (bit_count_ < nbits) {
      bit_buf_ = next_u64();
      bit_count_ = 64;
    }
    std::uint64_t v = bit_buf_ & ((std::uint64_t{1} << nbits) - 1);
    bit_buf_ >>= nbits;
    bit_count_ -= nbits;
    return v;
  }

 private:
  std::uint64_t key_;
  std::uint64_t lane_;
  std::uint64_t ctr_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int have_ = 0;
  std::uint64_t bit_buf_ = 0;
  int bit_count_ = 0;
};

// Stream roles, so walk and scenery randomness never share a stream.
enum class StreamRole : std::uint64_t {
  walk = 0x57414c4b,     // "WALK"
  scenery = 0x53434e52,  // "SCNR"
  sampler = 0x53414d50,  // "SAMP"
};

inline StreamId trial_stream(std::uint64_t master, StreamRole role, std::uint64_t trial) {
  return derive_stream(master, static_cast<std::uint64_t>(role), trial);
}

// Draw words for a given lattice site under a scenery stream: pure in
// (stream, site, draw index).
inline std::array<std::uint64_t, 2> site_words(StreamId id, std::uint64_t site_key,
                                               std::uint64_t draw_index) {
  return philox2x64(site_key, id.lane + draw_index, id.key);
}

inline double word_to_unit(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse standard-normal CDF, Wichura's PPND16 (AS 241). Absolute error
// below 1e-15 over (0,1); used to turn one uniform word into one normal.
double inverse_normal_cdf(double p);

}  // namespace rwrs
