#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace infodemic {

// Seeded generator with platform-independent derived distributions.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions (uniform_int_distribution, std::shuffle) do not, so the
// helpers below are written out explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), rejection sampled. n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x);

// Sub-seed for a keyed stream, e.g. derive_seed(global_seed, tweet_id).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace infodemic
