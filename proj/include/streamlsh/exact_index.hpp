#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "streamlsh/popularity.hpp"
#include "streamlsh/sparse_vector.hpp"
#include "streamlsh/stream_index.hpp"

namespace streamlsh {

/// Similarity, age, quality and (optionally) popularity radii of a query.
/// An item qualifies when sim >= sim, age <= age, quality >= quality and
/// pop >= pop.
struct RadiusParams {
  double sim = 0.0;
  Tick age = std::numeric_limits<Tick>::max();
  double quality = 0.0;
  std::optional<double> pop;

  void validate() const;
};

/// Brute-force index over every item of a stream, with no eviction.
/// An inverted index narrows similarity computation to items that share a
/// dimension with the query; all others are exactly 1/2-similar.
class ExactIndex {
 public:
  ExactIndex() = default;
  explicit ExactIndex(std::vector<Item> items);

  /// Throws ProtocolError on a duplicate id, DomainError on a zero vector.
  void add(Item item);

  const std::vector<Item>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  std::optional<std::size_t> position(std::string_view id) const;

  /// Angular similarity of the query to every item, by position.
  std::vector<double> similarities(const SparseVector& query) const;

  /// Positions of the items satisfying all radii at tick `now`, ascending.
  /// Items arriving after `now` are ignored. A popularity radius requires
  /// a ledger.
  std::vector<std::size_t> ideal_positions(const SparseVector& query, const RadiusParams& radii, Tick now,
                                           const PopularityLedger* popularity = nullptr) const;

  /// Ids of ideal_positions(), sorted.
  std::vector<std::string> ideal_set(const SparseVector& query, const RadiusParams& radii, Tick now,
                                     const PopularityLedger* popularity = nullptr) const;

 private:
  std::vector<Item> items_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::vector<std::vector<std::uint32_t>> postings_;  // dimension -> item positions
};

/// True if the item satisfies every radius.
bool within_radius(const RadiusParams& radii, double similarity, Tick arrival, double quality, Tick now,
                   const PopularityLedger* popularity, std::string_view id);

/// Items found in the query's buckets that satisfy the radii; sorted ids.
std::vector<std::string> approx_set(const StreamIndex& index, const SparseVector& query, const RadiusParams& radii,
                                    Tick now, const PopularityLedger* popularity = nullptr);

}  // namespace streamlsh
