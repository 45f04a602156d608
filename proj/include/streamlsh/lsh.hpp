#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "streamlsh/sparse_vector.hpp"

namespace streamlsh {

/// A k-bit sketch packed into a word; bit i holds the i-th component hash.
using Sketch = std::uint64_t;

inline constexpr unsigned kMaxSketchBits = 64;

/// Standard normal coordinate of the random hyperplane `seed` along
/// `dimension`. A pure function of its arguments (counter-based), rounded
/// to float so cached and on-the-fly evaluation agree bit for bit.
float hyperplane_coordinate(std::uint64_t seed, std::uint32_t dimension) noexcept;

/// Random-hyperplane hash h(v) = [r . v >= 0] for angular similarity.
/// Collision probability over random seeds equals the angular similarity.
class HyperplaneHash {
 public:
  explicit HyperplaneHash(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  double project(const SparseVector& v) const noexcept;
  /// Throws DomainError for the zero vector.
  bool operator()(const SparseVector& v) const;

 private:
  std::uint64_t seed_;
};

/// Concatenation of k hyperplane hashes.
class SketchFunction {
 public:
  explicit SketchFunction(std::vector<HyperplaneHash> hashes);

  unsigned bits() const noexcept { return static_cast<unsigned>(hashes_.size()); }
  const std::vector<HyperplaneHash>& hashes() const noexcept { return hashes_; }
  Sketch operator()(const SparseVector& v) const;

 private:
  std::vector<HyperplaneHash> hashes_;
};

/// The L sketch functions of an index, derived from one seed. Hyperplane
/// coordinates for dimensions below `materialize`'s bound are cached;
/// the rest are generated on demand with identical results.
class LshFamily {
 public:
  LshFamily(unsigned k, unsigned tables, std::uint64_t seed);

  unsigned k() const noexcept { return k_; }
  unsigned tables() const noexcept { return static_cast<unsigned>(functions_.size()); }
  std::uint64_t seed() const noexcept { return seed_; }
  const SketchFunction& function(std::size_t table) const { return functions_.at(table); }

  /// Caches coordinates for dimensions [0, dimensions). Not thread-safe;
  /// call before sharing the family.
  void materialize(std::uint32_t dimensions);
  std::uint32_t materialized() const noexcept { return cached_dims_; }

  /// Throws DomainError for the zero vector.
  Sketch sketch(std::size_t table, const SparseVector& v) const;
  std::vector<Sketch> sketches(const SparseVector& v) const;

 private:
  unsigned k_;
  std::uint64_t seed_;
  std::vector<SketchFunction> functions_;
  std::uint32_t cached_dims_ = 0;
  std::vector<float> coordinates_;  // [dimension][table * k + bit]
};

}  // namespace streamlsh
