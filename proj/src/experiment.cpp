#include "streamlsh/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "streamlsh/error.hpp"
#include "streamlsh/exact_index.hpp"

namespace streamlsh {

double follower_quality(std::uint64_t followers, std::uint64_t norm) {
  if (norm == 0) throw DomainError("follower norm must be positive");
  const double ratio = std::min(1.0, static_cast<double>(followers) / static_cast<double>(norm));
  return std::log2(1.0 + ratio);
}

double record_quality(const CorpusRecord& record, const QualityRule& rule) {
  if (record.quality) return *record.quality;
  if (rule.followers_norm && record.followers) return follower_quality(*record.followers, *rule.followers_norm);
  return 1.0;
}

Vocabulary build_vocabulary(std::span<const CorpusRecord> records) {
  Vocabulary vocab;
  for (const auto& r : records) {
    if (r.text) vocab.add_document(tokenize(*r.text));
  }
  return vocab;
}

Item to_item(const CorpusRecord& record, const Vocabulary& vocab, const QualityRule& rule) {
  Item item;
  item.id = record.id;
  item.tick = record.tick;
  item.quality = record_quality(record, rule);
  try {
    item.vector = record.text ? vocab.vectorize(tokenize(*record.text)) : SparseVector::from_entries(*record.vector);
  } catch (const DomainError& e) {
    throw DomainError(fmt::format("item '{}': {}", record.id, e.what()));
  }
  return item;
}

std::vector<Item> to_items(std::span<const CorpusRecord> records, const Vocabulary& vocab, const QualityRule& rule) {
  std::vector<Item> items;
  items.reserve(records.size());
  for (const auto& r : records) items.push_back(to_item(r, vocab, rule));
  return items;
}

std::size_t tick_prefix(std::span<const Tick> ticks, double fraction) {
  auto end = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ticks.size())));
  end = std::min(end, ticks.size());
  while (end > 0 && end < ticks.size() && ticks[end] == ticks[end - 1]) ++end;
  return end;
}

Split split_and_sample(std::span<const Tick> ticks, double train_fraction, std::size_t sample_size, Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError(fmt::format("train fraction must lie in (0, 1), got {}", train_fraction));
  }
  if (!std::is_sorted(ticks.begin(), ticks.end())) throw ProtocolError("corpus is not sorted by tick");
  Split split;
  split.train_end = tick_prefix(ticks, train_fraction);
  if (split.train_end == 0) throw ProtocolError("empty train set");
  if (split.train_end == ticks.size()) throw ProtocolError("empty test set");
  std::vector<std::size_t> test(ticks.size() - split.train_end);
  std::iota(test.begin(), test.end(), split.train_end);
  const auto count = std::min(sample_size, test.size());
  sample_prefix(test, count, rng);
  split.queries.assign(test.begin(), test.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(split.queries.begin(), split.queries.end());
  return split;
}

InterestStream synthesize_interest(std::span<const Item> train, double query_probability, std::size_t top_n, Rng& rng,
                                   double stream_fraction) {
  if (!(query_probability >= 0.0 && query_probability <= 1.0)) {
    throw ValidationError(fmt::format("query probability must lie in [0, 1], got {}", query_probability));
  }
  std::vector<Tick> ticks;
  ticks.reserve(train.size());
  for (const auto& item : train) ticks.push_back(item.tick);
  if (!std::is_sorted(ticks.begin(), ticks.end())) throw ProtocolError("train stream is not sorted by tick");

  InterestStream out;
  out.stream_end = stream_fraction >= 1.0 ? train.size() : tick_prefix(ticks, stream_fraction);
  ExactIndex universe;
  for (std::size_t i = 0; i < out.stream_end; ++i) {
    universe.add(train[i]);
    out.events.push_back({train[i].id, train[i].tick, std::nullopt});
  }
  const auto n = std::min(top_n, universe.size());
  std::vector<std::size_t> order(universe.size());
  for (std::size_t q = out.stream_end; q < train.size(); ++q) {
    if (!rng.bernoulli(query_probability)) continue;
    out.queries.push_back(q);
    if (n == 0) continue;
    const auto sims = universe.similarities(train[q].vector);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](std::size_t a, std::size_t b) { return sims[a] != sims[b] ? sims[a] > sims[b] : a < b; });
    for (std::size_t j = 0; j < n; ++j) out.events.push_back({universe.items()[order[j]].id, train[q].tick, std::nullopt});
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const InterestEvent& a, const InterestEvent& b) { return a.tick < b.tick; });
  return out;
}

void replay(StreamIndex& index, std::span<const Item> items, std::span<const InterestEvent> events,
            std::optional<Tick> through, const std::function<void(const TickStats&)>& on_tick) {
  const auto by_tick_item = [](const Item& a, const Item& b) { return a.tick < b.tick; };
  const auto by_tick_event = [](const InterestEvent& a, const InterestEvent& b) { return a.tick < b.tick; };
  if (!std::is_sorted(items.begin(), items.end(), by_tick_item)) throw ProtocolError("items are not sorted by tick");
  if (!std::is_sorted(events.begin(), events.end(), by_tick_event)) throw ProtocolError("events are not sorted by tick");
  const Tick first = index.next_tick();
  if (!items.empty() && items.front().tick < first) {
    throw ProtocolError(fmt::format("item '{}' at tick {} precedes the index clock {}", items.front().id,
                                    items.front().tick, first));
  }
  if (!events.empty() && events.front().tick < first) {
    throw ProtocolError(fmt::format("interest event at tick {} precedes the index clock {}", events.front().tick, first));
  }

  std::optional<Tick> last = through;
  if (!items.empty()) last = std::max(last.value_or(0), items.back().tick);
  if (!events.empty()) last = std::max(last.value_or(0), events.back().tick);
  if (!last || *last < first) return;

  std::size_t i = 0, e = 0;
  for (Tick t = first;; ++t) {
    const std::size_t i0 = i, e0 = e;
    while (i < items.size() && items[i].tick == t) ++i;
    while (e < events.size() && events[e].tick == t) ++e;
    const auto stats = index.tick(items.subspan(i0, i - i0), events.subspan(e0, e - e0));
    if (on_tick) on_tick(stats);
    if (t == *last) break;
  }
}

double replay_steady_size(StreamIndex& index, std::span<const Item> items, std::span<const InterestEvent> events) {
  std::vector<std::size_t> totals;
  replay(index, items, events, std::nullopt, [&](const TickStats& stats) {
    std::size_t total = 0;
    for (auto n : stats.table_sizes) total += n;
    totals.push_back(total);
  });
  if (totals.empty()) return 0.0;
  const std::size_t from = totals.size() - std::max<std::size_t>(1, totals.size() / 4);
  double sum = 0.0;
  for (std::size_t i = from; i < totals.size(); ++i) sum += static_cast<double>(totals[i]);
  return sum / static_cast<double>(totals.size() - from);
}

std::optional<double> expected_capacity(const RetentionPolicy& policy, double arrivals_per_tick, double mean_quality,
                                        unsigned tables) {
  if (const auto* s = std::get_if<SmoothPolicy>(&policy)) {
    return arrivals_per_tick * mean_quality / (1.0 - s->retention) * tables;
  }
  if (const auto* t = std::get_if<ThresholdPolicy>(&policy)) return static_cast<double>(t->table_size) * tables;
  return std::nullopt;
}

std::size_t calibrate_bucket_size(const StreamIndexConfig& base, const std::shared_ptr<const LshFamily>& family,
                                  std::span<const Item> items, std::span<const InterestEvent> events, double target) {
  if (!(target > 0.0)) throw ValidationError("calibration target must be positive");
  const Tick first = items.empty() ? 0 : items.front().tick;
  const auto size_for = [&](std::size_t bucket_size) {
    StreamIndexConfig config = base;
    config.policy = BucketPolicy{bucket_size};
    StreamIndex index(config, family, first);
    return replay_steady_size(index, items, events);
  };
  std::size_t lo = 1, hi = 1;
  double hi_size = size_for(hi);
  while (hi_size < target) {
    const double previous = hi_size;
    lo = hi;
    hi *= 2;
    hi_size = size_for(hi);
    if (hi_size <= previous) return lo;  // saturated: no bucket ever overflows
  }
  if (hi == 1) return 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const double mid_size = size_for(mid);
    if (mid_size < target) {
      lo = mid;
    } else {
      hi = mid;
      hi_size = mid_size;
    }
  }
  return std::abs(size_for(lo) - target) < std::abs(hi_size - target) ? lo : hi;
}

}  // namespace streamlsh
