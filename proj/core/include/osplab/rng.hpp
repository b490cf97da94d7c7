#pragma once

#include <cstdint>

namespace osplab {

__extension__ using uint128_t = unsigned __int128;

/// Counter-based random stream.
///
/// Draw number `c` of the stream with seed `s` is a pure function of (s, c):
/// it is the SplitMix64 finalizer applied to `s + (c + 1) * 0x9E3779B97F4A7C15`.
/// This is exactly the output sequence of the reference SplitMix64 generator
/// seeded with `s`, so any language can replay it bit-for-bit.
///
/// Uniform doubles take the top 53 bits: `(x >> 11) * 2^-53`, in [0, 1).
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  constexpr explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : seed_(seed), counter_(counter) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t bits_at(std::uint64_t seed, std::uint64_t counter) noexcept {
    return mix(seed + (counter + 1) * kGamma);
  }

  static constexpr double uniform_at(std::uint64_t seed, std::uint64_t counter) noexcept {
    return static_cast<double>(bits_at(seed, counter) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t next_bits() noexcept { return bits_at(seed_, counter_++); }
  constexpr double next_uniform() noexcept { return uniform_at(seed_, counter_++); }

  /// Uniform integer in [0, bound) by multiply-shift on 64 bits.
  constexpr std::uint64_t next_below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<uint128_t>(next_bits()) * bound) >> 64);
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

/// Derives an independent stream seed from a base seed and a stream index.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return CounterRng::mix(base ^ CounterRng::mix(index + CounterRng::kGamma));
}

}  // namespace osplab
