#pragma once

#include <cstdint>
#include <limits>

namespace omlevy {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key of stream `index` under `master`. Streams with distinct (master, index) pairs
/// are statistically independent; the mapping is part of the reproducibility contract.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

/// Counter-based generator: the i-th output (i = 1, 2, ...) of stream `key` is
/// mix64(key + i * 0x9E3779B97F4A7C15). Satisfies UniformRandomBitGenerator.
///
/// Uniforms take the top 53 bits; normals use the Marsaglia polar method with the
/// second variate cached. These transforms are fixed here (rather than delegated to
/// <random> distributions, whose algorithms are implementation-defined) so that a
/// seed maps to the same sample path on every platform.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key = 0) : key_(key) {}
  RandomStream(std::uint64_t master, std::uint64_t index) : key_(derive_seed(master, index)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  double normal();
  /// Exponential with unit rate.
  double exponential();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace omlevy
