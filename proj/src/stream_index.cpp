#include "streamlsh/stream_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/core.h>

#include "streamlsh/error.hpp"
#include "streamlsh/random.hpp"

namespace streamlsh {

namespace {

enum StreamTag : std::uint64_t { kHashTag = 1, kInsertTag = 2, kReinsertTag = 3, kEvictTag = 4 };

std::shared_ptr<const LshFamily> resolve_family(const StreamIndexConfig& config,
                                                std::shared_ptr<const LshFamily> family) {
  config.validate();
  if (!family) return default_family(config);
  if (family->k() != config.k || family->tables() != config.tables) {
    throw ValidationError(fmt::format("hash family ({} bits, {} tables) does not match config ({} bits, {} tables)",
                                      family->k(), family->tables(), config.k, config.tables));
  }
  return family;
}

void check_probability(double value, std::string_view what) {
  if (!(value >= 0.0 && value <= 1.0)) throw ValidationError(fmt::format("{} must lie in [0, 1], got {}", what, value));
}

}  // namespace

std::shared_ptr<const LshFamily> default_family(const StreamIndexConfig& config, std::uint32_t materialize) {
  config.validate();
  auto family = std::make_shared<LshFamily>(config.k, config.tables, derive_seed(config.seed, {kHashTag}));
  if (materialize > 0) family->materialize(materialize);
  return family;
}

Tick age_of(Tick arrival, Tick now) {
  if (now < arrival) throw ProtocolError(fmt::format("tick {} precedes arrival tick {}", now, arrival));
  return now - arrival;
}

void StreamIndexConfig::validate() const {
  if (k == 0 || k > kMaxSketchBits) throw ValidationError(fmt::format("k must be in [1, {}], got {}", kMaxSketchBits, k));
  if (tables == 0) throw ValidationError("L must be positive");
  streamlsh::validate(policy);
  if (dynapop) {
    if (!(dynapop->insertion > 0.0 && dynapop->insertion <= 1.0)) {
      throw ValidationError(fmt::format("insertion factor u must lie in (0, 1], got {}", dynapop->insertion));
    }
    if (!(dynapop->decay > 0.0 && dynapop->decay < 1.0)) {
      throw ValidationError(fmt::format("interest decay must lie in (0, 1), got {}", dynapop->decay));
    }
  }
}

StreamIndex::StreamIndex(const StreamIndexConfig& config, std::shared_ptr<const LshFamily> family, Tick first_tick)
    : config_(config), tables_(resolve_family(config, std::move(family))), next_tick_(first_tick) {
  if (config_.dynapop) ledger_.emplace(config_.dynapop->decay);
}

ItemHandle StreamIndex::store(StoredItem item) {
  ItemHandle handle;
  if (!free_.empty()) {
    handle = free_.back();
    free_.pop_back();
  } else {
    handle = static_cast<ItemHandle>(slots_.size());
    slots_.emplace_back();
  }
  live_.emplace(item.id, handle);
  slots_[handle] = std::move(item);
  return handle;
}

void StreamIndex::release(ItemHandle handle) {
  StoredItem item = std::move(*slots_[handle]);
  slots_[handle].reset();
  free_.push_back(handle);
  live_.erase(item.id);
  if (!config_.dynapop || config_.dynapop->evicted_cache == 0) return;
  if (cache_.size() >= config_.dynapop->evicted_cache) {
    cache_index_.erase(cache_.front().id);
    cache_.pop_front();
  }
  std::string id = item.id;
  cache_.push_back(std::move(item));
  cache_index_.emplace(std::move(id), std::prev(cache_.end()));
}

std::optional<ItemHandle> StreamIndex::revive(const std::string& id) {
  if (auto it = live_.find(id); it != live_.end()) return it->second;
  auto it = cache_index_.find(id);
  if (it == cache_index_.end()) return std::nullopt;
  StoredItem item = std::move(*it->second);
  cache_.erase(it->second);
  cache_index_.erase(it);
  return store(std::move(item));
}

const StoredItem& StreamIndex::item(ItemHandle handle) const {
  if (handle >= slots_.size() || !slots_[handle]) throw ValidationError(fmt::format("no live item with handle {}", handle));
  return *slots_[handle];
}

std::optional<ItemHandle> StreamIndex::find(std::string_view id) const {
  auto it = live_.find(std::string(id));
  if (it == live_.end()) return std::nullopt;
  return it->second;
}

bool StreamIndex::resolvable(std::string_view id) const {
  const std::string key(id);
  return live_.contains(key) || cache_index_.contains(key);
}

std::size_t StreamIndex::copies(std::string_view id) const {
  auto handle = find(id);
  return handle ? item(*handle).copies : 0;
}

TickStats StreamIndex::tick(std::span<const Item> items, std::span<const InterestEvent> events) {
  const Tick t = next_tick_;
  const std::size_t table_count = tables_.size();

  // Validate everything before mutating anything.
  std::unordered_set<std::string_view> batch;
  for (const auto& item : items) {
    if (item.tick != t) throw ProtocolError(fmt::format("item '{}' has tick {}, expected {}", item.id, item.tick, t));
    if (!batch.insert(item.id).second || resolvable(item.id)) {
      throw ProtocolError(fmt::format("duplicate item id '{}'", item.id));
    }
    check_probability(item.quality, fmt::format("quality of item '{}'", item.id));
    if (item.vector.norm() == 0.0) throw DomainError(fmt::format("item '{}' has a zero vector", item.id));
  }
  if (!events.empty() && !config_.dynapop) throw ValidationError("interest events require DynaPop to be enabled");
  for (const auto& e : events) {
    if (e.tick != t) throw ProtocolError(fmt::format("interest in '{}' has tick {}, expected {}", e.item_id, e.tick, t));
    if (e.quality) check_probability(*e.quality, fmt::format("quality override for '{}'", e.item_id));
  }

  TickStats stats;
  stats.tick = t;
  stats.arrivals = items.size();
  stats.interest_events = events.size();
  std::vector<ItemHandle> maybe_dead;

  // 1. quality-probabilistic insertion of arrivals
  std::vector<ItemHandle> arrivals;
  arrivals.reserve(items.size());
  for (const auto& item : items) {
    arrivals.push_back(store(StoredItem{item.id, item.tick, next_seq_++, item.vector, item.quality,
                                        tables_.family().sketches(item.vector), 0}));
  }
  for (std::size_t i = 0; i < table_count; ++i) {
    Rng coins(derive_seed(config_.seed, {kInsertTag, t, i}));
    for (ItemHandle h : arrivals) {
      StoredItem& it = *slots_[h];
      if (!coins.bernoulli(config_.quality_sensitive ? it.quality : 1.0)) continue;
      tables_.insert(i, TableEntry{h, it.sketches[i], it.tick, it.seq, t});
      ++it.copies;
      ++stats.inserted;
    }
  }
  maybe_dead.insert(maybe_dead.end(), arrivals.begin(), arrivals.end());

  // 2. DynaPop re-insertion
  if (!events.empty()) {
    ledger_->record(events, t);
    std::vector<Rng> coins;
    coins.reserve(table_count);
    for (std::size_t i = 0; i < table_count; ++i) coins.emplace_back(derive_seed(config_.seed, {kReinsertTag, t, i}));
    for (const auto& e : events) {
      auto handle = revive(e.item_id);
      if (!handle) {
        ++stats.dropped_events;
        continue;
      }
      StoredItem& it = *slots_[*handle];
      if (e.quality) it.quality = *e.quality;
      const double p = (config_.quality_sensitive ? it.quality : 1.0) * config_.dynapop->insertion;
      for (std::size_t i = 0; i < table_count; ++i) {
        if (!coins[i].bernoulli(p)) continue;
        if (tables_.insert(i, TableEntry{*handle, it.sketches[i], it.tick, it.seq, t})) {
          ++it.copies;
          ++stats.reinserted;
        } else {
          ++stats.refreshed;
        }
      }
      maybe_dead.push_back(*handle);
    }
  }

  // 3. retention
  for (std::size_t i = 0; i < table_count; ++i) {
    Rng rng(derive_seed(config_.seed, {kEvictTag, t, i}));
    for (ItemHandle h : eliminate(tables_.table(i), config_.policy, t, rng)) {
      --slots_[h]->copies;
      ++stats.evicted;
      maybe_dead.push_back(h);
    }
  }

  std::sort(maybe_dead.begin(), maybe_dead.end());
  maybe_dead.erase(std::unique(maybe_dead.begin(), maybe_dead.end()), maybe_dead.end());
  // Release in arrival order so the evicted cache order is deterministic.
  std::sort(maybe_dead.begin(), maybe_dead.end(), [&](ItemHandle a, ItemHandle b) {
    return slots_[a]->seq < slots_[b]->seq;
  });
  for (ItemHandle h : maybe_dead) {
    if (slots_[h] && slots_[h]->copies == 0) release(h);
  }

  stats.table_sizes.reserve(table_count);
  for (std::size_t i = 0; i < table_count; ++i) stats.table_sizes.push_back(tables_.table(i).size());
  now_ = t;
  next_tick_ = t + 1;
  return stats;
}

}  // namespace streamlsh
