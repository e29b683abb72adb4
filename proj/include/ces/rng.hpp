#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A generator is addressed by (seed, stream): the 64-bit seed is the Philox key and the
// 64-bit stream id fills the upper half of the 128-bit counter, the lower half counts
// blocks. Streams are therefore independent by construction and the output is a pure
// function of (seed, stream, position), bit-identical on every platform.

#include <array>
#include <cstdint>

namespace ces {

class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  result_type operator()();
  void discard(std::uint64_t z);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// The raw 10-round bijection.
  static Block block(Block counter, Key key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  int pos_ = 4;
};

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Philox4x32& eng);

/// Seed used when none is given: the CES_SEED environment variable, else a fixed constant.
std::uint64_t default_seed();

}  // namespace ces
