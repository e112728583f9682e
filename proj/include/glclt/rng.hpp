#pragma once

#include <cstdint>
#include <initializer_list>

namespace glclt {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Combines an ordered list of words into one 64-bit key.
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);

/// Counter-based generator: the i-th output is a pure function of (key, i),
/// so a stream can be created for any (seed, point index) without touching
/// a shared state. Outputs are identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(hash_words({seed, stream})) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace glclt
