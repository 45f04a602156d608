#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "streamlsh/hash_table.hpp"
#include "streamlsh/random.hpp"

namespace streamlsh {

/// Caps every table at `table_size` entries, evicting oldest first.
struct ThresholdPolicy {
  std::size_t table_size = 0;
  friend bool operator==(const ThresholdPolicy&, const ThresholdPolicy&) = default;
};

/// Caps every bucket at `bucket_size` entries, evicting oldest first.
struct BucketPolicy {
  std::size_t bucket_size = 0;
  friend bool operator==(const BucketPolicy&, const BucketPolicy&) = default;
};

/// Each tick, every entry survives with probability `retention`.
struct SmoothPolicy {
  double retention = 0.95;
  friend bool operator==(const SmoothPolicy&, const SmoothPolicy&) = default;
};

using RetentionPolicy = std::variant<ThresholdPolicy, BucketPolicy, SmoothPolicy>;

/// Throws ValidationError unless the parameter is in range.
void validate(const RetentionPolicy& policy);

/// Parses "threshold:<T_size>", "bucket:<B_size>" or "smooth:<p>".
RetentionPolicy parse_policy(std::string_view text);
/// Inverse of parse_policy.
std::string format_policy(const RetentionPolicy& policy);
/// "threshold", "bucket" or "smooth".
std::string_view policy_name(const RetentionPolicy& policy);

std::vector<ItemHandle> eliminate_threshold(HashTable& table, std::size_t table_size);

std::vector<ItemHandle> eliminate_bucket(HashTable& table, std::size_t bucket_size);

/// Removes a uniformly chosen fraction (1 - p) of the entries that were
/// not (re)inserted at tick `now`. The removal count is
/// floor((1-p) n) plus a Bernoulli draw on the fractional part, so each
/// eligible entry survives with probability exactly p.
std::vector<ItemHandle> eliminate_smooth(HashTable& table, double retention, Tick now, Rng& rng);

std::vector<ItemHandle> eliminate(HashTable& table, const RetentionPolicy& policy, Tick now, Rng& rng);

}  // namespace streamlsh
