#include "streamlsh/retention.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/core.h>

#include "streamlsh/error.hpp"

namespace streamlsh {

namespace {

template <typename... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Evicts the `excess` oldest of `candidates`.
std::vector<ItemHandle> evict_oldest(HashTable& table, std::vector<TableEntry> candidates, std::size_t excess) {
  std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(excess), candidates.end(),
                   older);
  std::vector<ItemHandle> evicted;
  evicted.reserve(excess);
  for (std::size_t i = 0; i < excess; ++i) evicted.push_back(candidates[i].item);
  std::sort(evicted.begin(), evicted.end(), [&](ItemHandle a, ItemHandle b) {
    return older(*table.find(a), *table.find(b));
  });
  for (auto item : evicted) table.erase(item);
  return evicted;
}

}  // namespace

void validate(const RetentionPolicy& policy) {
  std::visit(Overloaded{
                 [](const ThresholdPolicy& p) {
                   if (p.table_size < 1) throw ValidationError("threshold T_size must be at least 1");
                 },
                 [](const BucketPolicy& p) {
                   if (p.bucket_size < 1) throw ValidationError("bucket B_size must be at least 1");
                 },
                 [](const SmoothPolicy& p) {
                   if (!(p.retention > 0.0 && p.retention < 1.0)) {
                     throw ValidationError(fmt::format("smooth retention p must lie in (0, 1), got {}", p.retention));
                   }
                 },
             },
             policy);
}

RetentionPolicy parse_policy(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ValidationError(fmt::format("policy '{}' is not of the form name:value", text));
  const auto name = text.substr(0, colon);
  const auto value = text.substr(colon + 1);
  RetentionPolicy policy;
  if (name == "threshold" || name == "bucket") {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw ValidationError(fmt::format("policy '{}' needs an integer size", text));
    }
    if (name == "threshold") {
      policy = ThresholdPolicy{n};
    } else {
      policy = BucketPolicy{n};
    }
  } else if (name == "smooth") {
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw ValidationError(fmt::format("policy '{}' needs a real retention factor", text));
    }
    policy = SmoothPolicy{p};
  } else {
    throw ValidationError(fmt::format("unknown retention policy '{}'", name));
  }
  validate(policy);
  return policy;
}

std::string format_policy(const RetentionPolicy& policy) {
  return std::visit(Overloaded{
                        [](const ThresholdPolicy& p) { return fmt::format("threshold:{}", p.table_size); },
                        [](const BucketPolicy& p) { return fmt::format("bucket:{}", p.bucket_size); },
                        [](const SmoothPolicy& p) { return fmt::format("smooth:{}", p.retention); },
                    },
                    policy);
}

std::string_view policy_name(const RetentionPolicy& policy) {
  static constexpr std::string_view kNames[] = {"threshold", "bucket", "smooth"};
  return kNames[policy.index()];
}

std::vector<ItemHandle> eliminate_threshold(HashTable& table, std::size_t table_size) {
  if (table.size() <= table_size) return {};
  const std::size_t excess = table.size() - table_size;
  auto entries = table.entries();
  return evict_oldest(table, std::vector<TableEntry>(entries.begin(), entries.end()), excess);
}

std::vector<ItemHandle> eliminate_bucket(HashTable& table, std::size_t bucket_size) {
  std::vector<ItemHandle> evicted;
  for (Sketch key : table.bucket_keys()) {
    auto members = table.bucket(key);
    if (members.size() <= bucket_size) continue;
    std::vector<TableEntry> candidates;
    candidates.reserve(members.size());
    for (auto item : members) candidates.push_back(*table.find(item));
    auto out = evict_oldest(table, std::move(candidates), members.size() - bucket_size);
    evicted.insert(evicted.end(), out.begin(), out.end());
  }
  return evicted;
}

std::vector<ItemHandle> eliminate_smooth(HashTable& table, double retention, Tick now, Rng& rng) {
  std::vector<ItemHandle> eligible;
  eligible.reserve(table.size());
  for (const auto& e : table.entries()) {
    if (e.touched < now) eligible.push_back(e.item);
  }
  const double expected = (1.0 - retention) * static_cast<double>(eligible.size());
  const double whole = std::floor(expected);
  auto count = static_cast<std::size_t>(whole);
  if (rng.bernoulli(expected - whole)) ++count;
  sample_prefix(eligible, count, rng);
  eligible.resize(count);
  for (auto item : eligible) table.erase(item);
  return eligible;
}

std::vector<ItemHandle> eliminate(HashTable& table, const RetentionPolicy& policy, Tick now, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const ThresholdPolicy& p) { return eliminate_threshold(table, p.table_size); },
                        [&](const BucketPolicy& p) { return eliminate_bucket(table, p.bucket_size); },
                        [&](const SmoothPolicy& p) { return eliminate_smooth(table, p.retention, now, rng); },
                    },
                    policy);
}

}  // namespace streamlsh
