#pragma once

#include <array>
#include <cstdint>
#include <cmath>

#include "rrsa/normal.hpp"

namespace rrsa {

namespace detail {

struct Philox4x64Block {
  std::array<std::uint64_t, 4> words;
};

inline std::uint64_t mulhi64(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) >> 64);
}

/// One 4x64 block cipher evaluation, 10 rounds (Philox4x64-10).
inline Philox4x64Block philox4x64_10(std::array<std::uint64_t, 4> ctr,
                                     std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t m0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t m1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t w0 = 0x9E3779B97F4A7C15ULL;  // Weyl key schedule
  constexpr std::uint64_t w1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0;; ++round) {
    const std::uint64_t hi0 = mulhi64(m0, ctr[0]), lo0 = m0 * ctr[0];
    const std::uint64_t hi1 = mulhi64(m1, ctr[2]), lo1 = m1 * ctr[2];
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    if (round == 9) break;
    key[0] += w0;
    key[1] += w1;
  }
  return {ctr};
}

}  // namespace detail

/// Counter-based random stream keyed by (seed, stream_id).
///
/// The same (seed, stream_id) pair always reproduces the identical draw
/// sequence bit-for-bit; distinct stream_ids give statistically independent
/// streams, so concurrent tasks simply own distinct ids. The generator is
/// Philox4x64-10 with key = (seed, stream_id) and a 256-bit block counter.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{seed, stream_id} {}

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return key_[1]; }

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double next_uniform01() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw by inversion; consumes exactly one 64-bit word.
  double next_gaussian() { return inverse_normal_cdf(next_uniform01()); }

 private:
  void refill() {
    block_ = detail::philox4x64_10(counter_, key_).words;
    pos_ = 0;
    // 256-bit counter increment
    for (int i = 0; i < 4; ++i) {
      if (++counter_[i] != 0) break;
    }
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> block_{};
  int pos_ = 4;
};

}  // namespace rrsa
