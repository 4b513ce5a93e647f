#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace banditlab {

inline constexpr std::string_view kGeneratorName = "splitmix64";
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output finalizer (Stafford variant 13). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed. Distinct indices always give distinct
/// seeds for a fixed master because every stage is a bijection.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ (kGoldenGamma * index));
}

/// Counter-based 64-bit generator: state advances by the golden gamma and the
/// output is mix64(state). Fully specified here, so traces are portable
/// across standard libraries (unlike std:: distributions).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }
  constexpr result_type operator()() noexcept { return next(); }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept;

  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace banditlab
