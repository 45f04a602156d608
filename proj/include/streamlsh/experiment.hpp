#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "streamlsh/corpus.hpp"
#include "streamlsh/popularity.hpp"
#include "streamlsh/random.hpp"
#include "streamlsh/stream_index.hpp"
#include "streamlsh/vocabulary.hpp"

namespace streamlsh {

/// log2(1 + min(1, followers / norm)). Throws DomainError if norm is 0.
double follower_quality(std::uint64_t followers, std::uint64_t norm);

/// Quality of a record: its explicit quality, else follower_quality() when
/// a follower norm is configured and followers are present, else 1.
struct QualityRule {
  std::optional<std::uint64_t> followers_norm;
};
double record_quality(const CorpusRecord& record, const QualityRule& rule);

/// Vocabulary over the text records of `records`.
Vocabulary build_vocabulary(std::span<const CorpusRecord> records);

/// Converts a record; text is vectorized with `vocab`.
Item to_item(const CorpusRecord& record, const Vocabulary& vocab, const QualityRule& rule);
std::vector<Item> to_items(std::span<const CorpusRecord> records, const Vocabulary& vocab, const QualityRule& rule);

/// Index one past the first `fraction` of a tick-sorted sequence, moved
/// forward so no tick straddles the boundary.
std::size_t tick_prefix(std::span<const Tick> ticks, double fraction);

struct Split {
  std::size_t train_end = 0;          // train = [0, train_end), test = the rest
  std::vector<std::size_t> queries;   // test positions, ascending
};

/// Train/test split on a tick prefix, then a uniform sample of
/// min(sample_size, |test|) test positions. Throws ProtocolError when either
/// side is empty, ValidationError unless 0 < train_fraction < 1.
Split split_and_sample(std::span<const Tick> ticks, double train_fraction, std::size_t sample_size, Rng& rng);

struct InterestStream {
  std::size_t stream_end = 0;            // U = items [0, stream_end)
  std::vector<std::size_t> queries;      // sampled positions after U
  std::vector<InterestEvent> events;     // sorted by tick
};

/// The first `stream_fraction` of `train` (by tick prefix) is the item
/// stream U. Every later item becomes a query with probability
/// `query_probability`; its top_n most similar U items are interesting at
/// the query's tick. Every U item is also interesting at its own arrival.
InterestStream synthesize_interest(std::span<const Item> train, double query_probability, std::size_t top_n, Rng& rng,
                                   double stream_fraction = 0.75);

/// Feeds tick-sorted items and events through the index, one tick() per
/// tick from index.next_tick() up to the last item, event or `through`.
void replay(StreamIndex& index, std::span<const Item> items, std::span<const InterestEvent> events = {},
            std::optional<Tick> through = std::nullopt,
            const std::function<void(const TickStats&)>& on_tick = {});

/// Replays into `index` and returns the mean total entry count over the
/// last quarter of the replayed ticks.
double replay_steady_size(StreamIndex& index, std::span<const Item> items, std::span<const InterestEvent> events = {});

/// Closed-form expected total index size: mu*phi/(1-p)*L for Smooth,
/// T_size*L for Threshold, nullopt for Bucket.
std::optional<double> expected_capacity(const RetentionPolicy& policy, double arrivals_per_tick, double mean_quality,
                                        unsigned tables);

/// The B_size whose dry-run steady size is closest to `target`,
/// found by bisection (steady size is nondecreasing in B_size). `base`
/// supplies every other index setting.
std::size_t calibrate_bucket_size(const StreamIndexConfig& base, const std::shared_ptr<const LshFamily>& family,
                                  std::span<const Item> items, std::span<const InterestEvent> events, double target);

}  // namespace streamlsh
