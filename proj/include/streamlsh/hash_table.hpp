#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "streamlsh/lsh.hpp"

namespace streamlsh {

using Tick = std::uint64_t;

/// Dense handle of an item inside an index's item store.
using ItemHandle = std::uint32_t;

/// One copy of an item in one table.
struct TableEntry {
  ItemHandle item = 0;
  Sketch sketch = 0;
  Tick tick = 0;           // arrival tick of the item
  std::uint64_t seq = 0;   // arrival sequence number, breaks tick ties
  Tick touched = 0;        // tick of the latest (re)insertion
};

/// "Oldest first" order: arrival tick, then arrival sequence.
inline bool older(const TableEntry& a, const TableEntry& b) noexcept {
  return a.tick != b.tick ? a.tick < b.tick : a.seq < b.seq;
}

/// A single LSH hash table: sketch-keyed buckets with set semantics per
/// item. Entries are also kept in a dense array so uniform sampling over
/// the whole table is O(1) per draw.
class HashTable {
 public:
  /// Adds the entry. If the item is already present the stored entry keeps
  /// its position and only `touched` is refreshed; returns false then.
  bool insert(const TableEntry& entry);
  /// Removes the item's entry, returning false if it was absent.
  bool erase(ItemHandle item);
  bool contains(ItemHandle item) const { return slot_.contains(item); }
  const TableEntry* find(ItemHandle item) const;

  std::span<const ItemHandle> bucket(Sketch key) const;
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t bucket_count() const noexcept { return buckets_.size(); }
  /// All entries in storage order.
  std::span<const TableEntry> entries() const noexcept { return entries_; }

  /// Keys of all non-empty buckets, ascending.
  std::vector<Sketch> bucket_keys() const;

 private:
  struct Slot {
    std::uint32_t entry;   // index in entries_
    std::uint32_t member;  // index in the bucket vector
  };

  std::vector<TableEntry> entries_;
  std::unordered_map<ItemHandle, Slot> slot_;
  std::unordered_map<Sketch, std::vector<ItemHandle>> buckets_;
};

/// The L tables of an index together with the sketch functions that key them.
class TableSet {
 public:
  explicit TableSet(std::shared_ptr<const LshFamily> family);

  const LshFamily& family() const noexcept { return *family_; }
  std::shared_ptr<const LshFamily> shared_family() const noexcept { return family_; }
  std::size_t size() const noexcept { return tables_.size(); }

  HashTable& table(std::size_t i) { return tables_.at(i); }
  const HashTable& table(std::size_t i) const { return tables_.at(i); }

  /// Inserts into table `i`. The entry's sketch must be the table's sketch
  /// of the item. Idempotent per item.
  bool insert(std::size_t i, const TableEntry& entry) { return table(i).insert(entry); }

  /// Union of the query's L buckets, sorted and de-duplicated.
  /// Throws DomainError for the zero vector.
  std::vector<ItemHandle> lookup(const SparseVector& query) const;
  std::vector<ItemHandle> lookup(std::span<const Sketch> sketches) const;

  std::size_t total_entries() const noexcept;

 private:
  std::shared_ptr<const LshFamily> family_;
  std::vector<HashTable> tables_;
};

}  // namespace streamlsh
