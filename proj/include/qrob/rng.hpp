#pragma once

#include <cstdint>

namespace qrob {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer including the gamma increment:
///   z += 0x9E3779B97F4A7C15
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z ^= z >> 31
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z += kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of stream r under `master`: mix(master ^ (r * gamma)).
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t r) noexcept {
  return splitmix64_mix(master ^ (r * kGoldenGamma));
}

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  constexpr std::uint64_t child() const noexcept { return child_seed(master_seed, stream_index); }

  /// A fresh master derived from this stream, for nested experiments.
  constexpr SeedSpec nested(std::uint64_t stream) const noexcept { return {child(), stream}; }

  friend constexpr bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Counter-based generator: the k-th draw is splitmix64_mix(key + k * gamma).
/// Deviates are produced by fixed transforms (no <random> distributions) so
/// streams are identical across standard libraries.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  explicit CounterRng(const SeedSpec& seed) noexcept : key_(seed.child()) {}

  std::uint64_t next_u64() noexcept { return splitmix64_mix(key_ + (counter_++) * kGoldenGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1): never returns 0 or 1.
  double uniform_open() noexcept;
  /// Standard normal via Box-Muller; both outputs of a pair are used.
  double normal() noexcept;
  /// Exponential with the given rate, by inversion.
  double exponential(double rate) noexcept;
  /// Poisson by sequential inversion (rate <= 700).
  double poisson(double rate);

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qrob
