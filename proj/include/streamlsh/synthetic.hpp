#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "streamlsh/corpus.hpp"

namespace streamlsh {

/// Quality assignment for generated items:
///   constant:v      every item has quality v
///   uniform:lo:hi   quality drawn uniformly from [lo, hi]
///   followers:m     no quality; a follower count drawn from an
///                   exponential distribution with mean m
struct QualitySpec {
  enum class Kind { Constant, Uniform, Followers };
  Kind kind = Kind::Constant;
  double a = 1.0;
  double b = 1.0;

  static QualitySpec parse(std::string_view text);
  std::string format() const;
};

/// Planted-cluster corpus. Each cluster has a random sparse center over
/// `center_terms` dimensions. An item picks a cluster (Zipf with exponent
/// `skew`, uniform when 0), draws a target angular similarity uniformly
/// from [min_similarity, 1], and adds noise on `noise_terms` dimensions
/// outside the center's support, scaled so its similarity to the center
/// is exactly the target.
///
/// With `lifetime` > 0 clusters are bursty topics: each is born at a
/// uniform tick in [first_tick - lifetime, first_tick + ticks) and its
/// weight decays as exp(-(t - birth) / lifetime) afterwards (zero before).
struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::uint64_t ticks = 200;
  std::uint64_t first_tick = 0;
  std::uint64_t items_per_tick = 100;
  std::uint32_t clusters = 200;
  std::uint32_t dimensions = 20000;
  std::uint32_t center_terms = 20;
  std::uint32_t noise_terms = 10;
  double min_similarity = 0.8;
  double skew = 0.0;
  double lifetime = 0.0;
  QualitySpec quality;

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

/// Generates ticks * items_per_tick records with ids "s<n>", in tick order.
std::vector<CorpusRecord> generate_corpus(const SyntheticSpec& spec);

}  // namespace streamlsh
