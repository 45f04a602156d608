#include "streamlsh/hash_table.hpp"

#include <algorithm>

#include "streamlsh/error.hpp"

namespace streamlsh {

bool HashTable::insert(const TableEntry& entry) {
  auto it = slot_.find(entry.item);
  if (it != slot_.end()) {
    auto& stored = entries_[it->second.entry];
    stored.touched = std::max(stored.touched, entry.touched);
    return false;
  }
  auto& members = buckets_[entry.sketch];
  slot_.emplace(entry.item, Slot{static_cast<std::uint32_t>(entries_.size()), static_cast<std::uint32_t>(members.size())});
  members.push_back(entry.item);
  entries_.push_back(entry);
  return true;
}

bool HashTable::erase(ItemHandle item) {
  auto it = slot_.find(item);
  if (it == slot_.end()) return false;
  const Slot slot = it->second;
  slot_.erase(it);

  const Sketch key = entries_[slot.entry].sketch;
  auto bucket_it = buckets_.find(key);
  auto& members = bucket_it->second;
  if (slot.member + 1 != members.size()) {
    members[slot.member] = members.back();
    slot_.at(members[slot.member]).member = slot.member;
  }
  members.pop_back();
  if (members.empty()) buckets_.erase(bucket_it);

  if (slot.entry + 1 != entries_.size()) {
    entries_[slot.entry] = entries_.back();
    slot_.at(entries_[slot.entry].item).entry = slot.entry;
  }
  entries_.pop_back();
  return true;
}

const TableEntry* HashTable::find(ItemHandle item) const {
  auto it = slot_.find(item);
  return it == slot_.end() ? nullptr : &entries_[it->second.entry];
}

std::span<const ItemHandle> HashTable::bucket(Sketch key) const {
  auto it = buckets_.find(key);
  if (it == buckets_.end()) return {};
  return it->second;
}

std::vector<Sketch> HashTable::bucket_keys() const {
  std::vector<Sketch> keys;
  keys.reserve(buckets_.size());
  for (const auto& [key, members] : buckets_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

TableSet::TableSet(std::shared_ptr<const LshFamily> family) : family_(std::move(family)) {
  if (!family_) throw ValidationError("table set requires a hash family");
  tables_.resize(family_->tables());
}

std::vector<ItemHandle> TableSet::lookup(const SparseVector& query) const {
  return lookup(family_->sketches(query));
}

std::vector<ItemHandle> TableSet::lookup(std::span<const Sketch> sketches) const {
  if (sketches.size() != tables_.size()) throw ValidationError("one sketch per table is required");
  std::vector<ItemHandle> out;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    auto members = tables_[i].bucket(sketches[i]);
    out.insert(out.end(), members.begin(), members.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t TableSet::total_entries() const noexcept {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.size();
  return total;
}

}  // namespace streamlsh
