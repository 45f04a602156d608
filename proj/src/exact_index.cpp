#include "streamlsh/exact_index.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "streamlsh/error.hpp"

namespace streamlsh {

void RadiusParams::validate() const {
  if (!(sim >= 0.0 && sim <= 1.0)) throw ValidationError(fmt::format("R_sim must lie in [0, 1], got {}", sim));
  if (!(quality >= 0.0 && quality <= 1.0)) throw ValidationError(fmt::format("R_quality must lie in [0, 1], got {}", quality));
  if (pop && !(*pop >= 0.0 && *pop <= 1.0)) throw ValidationError(fmt::format("R_pop must lie in [0, 1], got {}", *pop));
}

bool within_radius(const RadiusParams& radii, double similarity, Tick arrival, double quality, Tick now,
                   const PopularityLedger* popularity, std::string_view id) {
  if (arrival > now || now - arrival > radii.age) return false;
  if (similarity < radii.sim || quality < radii.quality) return false;
  if (radii.pop) {
    if (!popularity) throw ValidationError("a popularity radius requires a popularity ledger");
    if (popularity->pop(id, now) < *radii.pop) return false;
  }
  return true;
}

ExactIndex::ExactIndex(std::vector<Item> items) {
  items_.reserve(items.size());
  for (auto& item : items) add(std::move(item));
}

void ExactIndex::add(Item item) {
  if (item.vector.norm() == 0.0) throw DomainError(fmt::format("item '{}' has a zero vector", item.id));
  const auto pos = items_.size();
  if (!positions_.emplace(item.id, pos).second) throw ProtocolError(fmt::format("duplicate item id '{}'", item.id));
  if (postings_.size() < item.vector.extent()) postings_.resize(item.vector.extent());
  for (const auto& e : item.vector.entries()) postings_[e.index].push_back(static_cast<std::uint32_t>(pos));
  items_.push_back(std::move(item));
}

std::optional<std::size_t> ExactIndex::position(std::string_view id) const {
  auto it = positions_.find(std::string(id));
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> ExactIndex::similarities(const SparseVector& query) const {
  if (query.norm() == 0.0) throw DomainError("query has a zero vector");
  std::vector<double> sims(items_.size(), 0.5);
  std::vector<std::uint32_t> touched;
  std::vector<char> seen(items_.size(), 0);
  for (const auto& e : query.entries()) {
    if (e.index >= postings_.size()) continue;
    for (auto pos : postings_[e.index]) {
      if (!seen[pos]) {
        seen[pos] = 1;
        touched.push_back(pos);
      }
    }
  }
  for (auto pos : touched) sims[pos] = angular_similarity(query, items_[pos].vector);
  return sims;
}

std::vector<std::size_t> ExactIndex::ideal_positions(const SparseVector& query, const RadiusParams& radii, Tick now,
                                                     const PopularityLedger* popularity) const {
  radii.validate();
  const auto sims = similarities(query);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const Item& item = items_[i];
    if (within_radius(radii, sims[i], item.tick, item.quality, now, popularity, item.id)) out.push_back(i);
  }
  return out;
}

std::vector<std::string> ExactIndex::ideal_set(const SparseVector& query, const RadiusParams& radii, Tick now,
                                               const PopularityLedger* popularity) const {
  std::vector<std::string> ids;
  for (auto pos : ideal_positions(query, radii, now, popularity)) ids.push_back(items_[pos].id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> approx_set(const StreamIndex& index, const SparseVector& query, const RadiusParams& radii,
                                    Tick now, const PopularityLedger* popularity) {
  radii.validate();
  std::vector<std::string> ids;
  for (ItemHandle h : index.lookup(query)) {
    const StoredItem& item = index.item(h);
    if (within_radius(radii, angular_similarity(query, item.vector), item.tick, item.quality, now, popularity, item.id)) {
      ids.push_back(item.id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace streamlsh
