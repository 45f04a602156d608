#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamlsh/analysis.hpp"
#include "streamlsh/exact_index.hpp"

namespace streamlsh {

struct RadiusRecall {
  RadiusParams radii;
  /// Mean of |approx| / |ideal| over queries with a nonempty ideal set;
  /// nullopt when every ideal set is empty.
  std::optional<double> recall;
  double std_error = 0.0;
  std::size_t n_queries = 0;  // queries contributing to the mean
  std::size_t n_skipped = 0;  // queries with an empty ideal set
  std::vector<std::size_t> ideal_sizes;   // per query, in query order
  std::vector<std::size_t> approx_sizes;
};

struct RecallReport {
  std::string policy;       // e.g. "smooth"
  std::string parameter;    // p, T_size or B_size
  unsigned k = 0;
  unsigned tables = 0;
  std::uint64_t seed = 0;
  std::string fingerprint;  // of the resolved config
  Tick now = 0;
  std::vector<RadiusRecall> rows;
};

/// Recall of `index` against `exact` for every radius, evaluated at the
/// index's current tick. Each query's similarities are computed once.
/// Throws InvariantError if an approximate result is not in the ideal set.
std::vector<RadiusRecall> recall_at_radius(const ExactIndex& exact, const StreamIndex& index,
                                           std::span<const SparseVector> queries, std::span<const RadiusParams> radii,
                                           Tick now, const PopularityLedger* popularity = nullptr);

/// Expected recall under a policy model: the mean over queries of the mean
/// success probability of their ideal items, given each item's similarity,
/// age and quality.
std::optional<double> predicted_recall(const ExactIndex& exact, std::span<const SparseVector> queries,
                                       const RadiusParams& radii, Tick now, const analysis::PolicyModel& model,
                                       unsigned k, unsigned tables);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fingerprint(std::string_view text);

/// One JSON line per radius, including per-query set sizes.
void write_report_jsonl(std::ostream& out, const RecallReport& report);

inline constexpr std::string_view kRecallCsvHeader =
    "policy,k,L,param,R_sim,R_age,R_quality,R_pop,recall,n_queries,n_skipped";
/// One CSV row per radius (no header). Missing values are left empty.
void write_report_csv(std::ostream& out, const RecallReport& report);

}  // namespace streamlsh
