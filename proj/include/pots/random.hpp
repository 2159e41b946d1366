#pragma once

#include <cstdint>
#include <random>

namespace pots {

__extension__ using uint128_t = unsigned __int128;

/// Golden-ratio increment of the SplitMix64 generator.
inline constexpr std::uint64_t kSplitMixIncrement = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output finalizer (Stafford "Mix13" variant).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Sequential random stream owned by one run.
///
/// Uniform reals and bounded integers are derived from raw engine output by
/// fixed arithmetic, so a given seed yields the same sequence on every
/// standard library (the std distributions are implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double canonical() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi); returns lo exactly when lo == hi.
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * canonical();
  }

  /// Uniform integer on [0, bound), bound > 0. Lemire's multiply-shift with
  /// rejection, unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept {
    std::uint64_t x = engine_();
    auto m = static_cast<uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = engine_();
        m = static_cast<uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pots
