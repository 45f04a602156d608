#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace streamlsh {

/// One round of the SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of tags. Every
/// stochastic decision in the library draws from a stream keyed this way,
/// so results depend only on (seed, path) and never on call order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t tag : path) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

/// Maps a 64-bit word to a double in [0, 1) with 53 bits of precision.
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// xoshiro256** seeded through SplitMix64. Satisfies
/// UniformRandomBitGenerator, but the helpers below are preferred since
/// their output is fully specified.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform in [0, 1).
  double uniform() noexcept { return to_unit((*this)()); }
  /// True with probability `p` (p <= 0 never, p >= 1 always).
  bool bernoulli(double p) noexcept { return p >= 1.0 || (p > 0.0 && uniform() < p); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// An independent generator for the given sub-stream.
  Rng split(std::uint64_t tag) noexcept;

 private:
  std::uint64_t s_[4];
};

/// Moves `count` uniformly chosen elements (without replacement) to the
/// front of `values` via a partial Fisher-Yates shuffle.
template <typename T>
void sample_prefix(std::vector<T>& values, std::size_t count, Rng& rng) {
  const std::size_t n = values.size();
  if (count > n) count = n;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(values[i], values[j]);
  }
}

}  // namespace streamlsh
