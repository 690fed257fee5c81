// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace ablab {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the
/// output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMulA = 0xD2511F53u;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMulA} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMulB} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    return ctr;
  }
};

/// SplitMix64 finalizer, used to derive independent keys from a user seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for an independent family of streams, e.g. the left and right half
/// of a Green's function box drawn from the same user seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag));
}

/// Counter-based generator addressed by (seed, stream, position). Any
/// 64-bit word of any stream can be produced in O(1) without touching the
/// others, which is what makes realization-parallel runs reproducible.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  /// Random-access 64-bit word number `index` of this stream.
  std::uint64_t word(std::uint64_t index) const {
    const auto out = Philox4x32::block(counter(index >> 1), key_);
    return (index & 1) ? (std::uint64_t{out[3]} << 32 | out[2])
                       : (std::uint64_t{out[1]} << 32 | out[0]);
  }

  std::uint64_t next_u64() {
    if (buffered_ == 0) {
      block_ = Philox4x32::block(counter(position_++), key_);
      buffered_ = 2;
    }
    --buffered_;
    return buffered_ == 1 ? (std::uint64_t{block_[1]} << 32 | block_[0])
                          : (std::uint64_t{block_[3]} << 32 | block_[2]);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0, by rejection of the short tail.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  Philox4x32::Counter counter(std::uint64_t block) const {
    return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  Philox4x32::Counter block_{};
  int buffered_ = 0;
};

/// Sequential ±1 signs of one stream: sign k is bit (k mod 64) of word k/64.
class SignStream {
 public:
  SignStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  int next() {
    if (left_ == 0) {
      bits_ = rng_.next_u64();
      left_ = 64;
    }
    --left_;
    const int s = (bits_ & 1u) ? 1 : -1;
    bits_ >>= 1;
    return s;
  }

 private:
  CounterRng rng_;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

}  // namespace ablab
