#pragma once

#include <array>
#include <cstdint>

namespace digits {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 random
/// bits; no state is carried between calls.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used to derive independent seeds from (seed, tag).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Stream of uniforms for one logical draw (a sample point, a verification
/// pool entry). The stream is addressed by (seed, index, stream); the n-th
/// uniform it yields is a pure function of those three values and n, so
/// sample i can be produced on any thread in any order.
///
/// Counter layout: {index_lo, index_hi, block, stream}, key = seed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index, std::uint32_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller. Always consumes exactly two uniforms
  /// (u1 then u2) and returns sqrt(-2 ln u1) cos(2 pi u2).
  double normal();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t index_lo_;
  std::uint32_t index_hi_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // number of 32-bit words already consumed from buffer_
};

}  // namespace digits
