#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "streamlsh/hash_table.hpp"
#include "streamlsh/lsh.hpp"
#include "streamlsh/popularity.hpp"
#include "streamlsh/retention.hpp"
#include "streamlsh/sparse_vector.hpp"

namespace streamlsh {

/// A stream element.
struct Item {
  std::string id;
  Tick tick = 0;
  SparseVector vector;
  double quality = 1.0;
};

/// Ticks elapsed since arrival. Throws ProtocolError if `now` precedes it.
Tick age_of(Tick arrival, Tick now);
inline Tick age_of(const Item& item, Tick now) { return age_of(item.tick, now); }

struct DynaPopConfig {
  double insertion = 1.0;  // u: re-insertion factor, in (0, 1]
  double decay = 0.95;     // alpha: interest decay, in (0, 1)
  /// Fully evicted items kept resolvable for re-indexing.
  std::size_t evicted_cache = 1 << 16;
};

struct StreamIndexConfig {
  unsigned k = 10;
  unsigned tables = 15;
  RetentionPolicy policy = SmoothPolicy{0.95};
  std::uint64_t seed = 0;
  /// When false every item is inserted into every table regardless of quality.
  bool quality_sensitive = true;
  std::optional<DynaPopConfig> dynapop;

  /// Throws ValidationError on any out-of-range parameter.
  void validate() const;
};

struct TickStats {
  Tick tick = 0;
  std::vector<std::size_t> table_sizes;
  std::size_t arrivals = 0;
  std::size_t inserted = 0;
  std::size_t reinserted = 0;  // DynaPop copies added
  std::size_t refreshed = 0;   // DynaPop hits on copies already present
  std::size_t evicted = 0;
  std::size_t interest_events = 0;
  std::size_t dropped_events = 0;  // interest in items no longer resolvable
};

/// Per-item metadata shared by all of an item's table entries.
struct StoredItem {
  std::string id;
  Tick tick = 0;
  std::uint64_t seq = 0;
  SparseVector vector;
  double quality = 1.0;
  std::vector<Sketch> sketches;  // one per table
  std::uint32_t copies = 0;      // live table entries
};

/// The hash family an index builds from `config` when none is supplied,
/// with coordinates cached for dimensions below `materialize`.
std::shared_ptr<const LshFamily> default_family(const StreamIndexConfig& config, std::uint32_t materialize = 0);

/// Bounded-memory LSH index over an item stream.
///
/// Each call to tick() processes one tick t, in this order:
///   1. every arriving item is inserted into each table independently with
///      probability quality(item) (or 1 when quality-insensitive);
///   2. with DynaPop, every interest event re-inserts its item into each
///      table independently with probability quality * u, refreshing copies
///      that are already present;
///   3. each table runs its retention policy. Smooth only considers copies
///      (re)inserted before t, so a copy of age a has survived a rounds.
/// Items whose last copy disappears are dropped (or, with DynaPop, parked in
/// a bounded cache so later interest can re-index them).
///
/// Randomness for (purpose, tick, table) is drawn from a stream derived from
/// the config seed, so replays are bit-identical. Single writer; lookups
/// between ticks only.
class StreamIndex {
 public:
  explicit StreamIndex(const StreamIndexConfig& config, std::shared_ptr<const LshFamily> family = nullptr,
                       Tick first_tick = 0);

  /// Processes tick next_tick(). Every item must carry that tick, a
  /// quality in [0, 1], a non-zero vector and an id not currently known to
  /// the index; every event must carry that tick.
  TickStats tick(std::span<const Item> items, std::span<const InterestEvent> events = {});

  Tick next_tick() const noexcept { return next_tick_; }
  /// The last processed tick; nullopt before the first.
  std::optional<Tick> now() const noexcept { return now_; }

  /// Handles of all items sharing at least one bucket with the query.
  std::vector<ItemHandle> lookup(const SparseVector& query) const { return tables_.lookup(query); }

  const StoredItem& item(ItemHandle handle) const;
  std::optional<ItemHandle> find(std::string_view id) const;
  /// True if the id is live or parked in the evicted cache.
  bool resolvable(std::string_view id) const;
  std::size_t copies(std::string_view id) const;

  const StreamIndexConfig& config() const noexcept { return config_; }
  const TableSet& tables() const noexcept { return tables_; }
  const LshFamily& family() const noexcept { return tables_.family(); }
  const PopularityLedger* popularity() const noexcept { return ledger_ ? &*ledger_ : nullptr; }

  std::size_t total_entries() const noexcept { return tables_.total_entries(); }
  std::size_t live_items() const noexcept { return live_.size(); }
  std::size_t cached_items() const noexcept { return cache_index_.size(); }

 private:
  friend struct SnapshotCodec;

  ItemHandle store(StoredItem item);
  void release(ItemHandle handle);
  std::optional<ItemHandle> revive(const std::string& id);

  StreamIndexConfig config_;
  TableSet tables_;
  Tick next_tick_;
  std::optional<Tick> now_;
  std::uint64_t next_seq_ = 0;

  std::vector<std::optional<StoredItem>> slots_;
  std::vector<ItemHandle> free_;
  std::unordered_map<std::string, ItemHandle> live_;

  std::list<StoredItem> cache_;  // oldest eviction first
  std::unordered_map<std::string, std::list<StoredItem>::iterator> cache_index_;

  std::optional<PopularityLedger> ledger_;
};

}  // namespace streamlsh
