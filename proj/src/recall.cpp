#include "streamlsh/recall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/core.h>
#include <json.hpp>

#include "streamlsh/error.hpp"

namespace streamlsh {

namespace {

struct Candidate {
  std::size_t position;
  double similarity;
};

std::optional<double> mean_of(std::span<const double> values, double* std_error) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (std_error) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const auto n = static_cast<double>(values.size());
    *std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  return mean;
}

std::string format_age(Tick age) {
  return age == std::numeric_limits<Tick>::max() ? std::string() : std::to_string(age);
}

}  // namespace

std::vector<RadiusRecall> recall_at_radius(const ExactIndex& exact, const StreamIndex& index,
                                           std::span<const SparseVector> queries, std::span<const RadiusParams> radii,
                                           Tick now, const PopularityLedger* popularity) {
  if (queries.empty()) throw ValidationError("recall needs at least one query");
  double min_sim = 1.0;
  for (const auto& r : radii) {
    r.validate();
    min_sim = std::min(min_sim, r.sim);
  }

  std::vector<RadiusRecall> rows(radii.size());
  std::vector<std::vector<double>> ratios(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) rows[r].radii = radii[r];

  const auto& items = exact.items();
  for (const auto& q : queries) {
    const auto sims = exact.similarities(q);
    std::vector<Candidate> ideal_pool;
    for (std::size_t i = 0; i < sims.size(); ++i) {
      if (sims[i] >= min_sim) ideal_pool.push_back({i, sims[i]});
    }
    std::vector<Candidate> approx_pool;
    for (ItemHandle h : index.lookup(q)) {
      const StoredItem& stored = index.item(h);
      const auto pos = exact.position(stored.id);
      if (!pos) throw InvariantError(fmt::format("indexed item '{}' is missing from the exact index", stored.id));
      approx_pool.push_back({*pos, angular_similarity(q, stored.vector)});
    }
    std::sort(approx_pool.begin(), approx_pool.end(),
              [](const Candidate& a, const Candidate& b) { return a.position < b.position; });

    for (std::size_t r = 0; r < radii.size(); ++r) {
      const auto& radius = radii[r];
      const auto keep = [&](const Candidate& c) {
        const Item& item = items[c.position];
        return within_radius(radius, c.similarity, item.tick, item.quality, now, popularity, item.id);
      };
      std::vector<std::size_t> ideal, approx;
      for (const auto& c : ideal_pool) {
        if (keep(c)) ideal.push_back(c.position);
      }
      for (const auto& c : approx_pool) {
        if (keep(c)) approx.push_back(c.position);
      }
      if (!std::includes(ideal.begin(), ideal.end(), approx.begin(), approx.end())) {
        throw InvariantError("approximate result set is not a subset of the ideal set");
      }
      auto& row = rows[r];
      row.ideal_sizes.push_back(ideal.size());
      row.approx_sizes.push_back(approx.size());
      if (ideal.empty()) {
        ++row.n_skipped;
      } else {
        ++row.n_queries;
        ratios[r].push_back(static_cast<double>(approx.size()) / static_cast<double>(ideal.size()));
      }
    }
  }
  for (std::size_t r = 0; r < radii.size(); ++r) rows[r].recall = mean_of(ratios[r], &rows[r].std_error);
  return rows;
}

std::optional<double> predicted_recall(const ExactIndex& exact, std::span<const SparseVector> queries,
                                       const RadiusParams& radii, Tick now, const analysis::PolicyModel& model,
                                       unsigned k, unsigned tables) {
  std::vector<double> per_query;
  for (const auto& q : queries) {
    const auto ideal = exact.ideal_positions(q, radii, now);
    if (ideal.empty()) continue;
    double sum = 0.0;
    for (auto pos : ideal) {
      const Item& item = exact.items()[pos];
      sum += analysis::sp(model, k, tables, angular_similarity(q, item.vector), static_cast<double>(now - item.tick),
                          item.quality);
    }
    per_query.push_back(sum / static_cast<double>(ideal.size()));
  }
  return mean_of(per_query, nullptr);
}

std::string fingerprint(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

void write_report_jsonl(std::ostream& out, const RecallReport& report) {
  for (const auto& row : report.rows) {
    nlohmann::ordered_json j;
    j["policy"] = report.policy;
    j["param"] = report.parameter;
    j["k"] = report.k;
    j["L"] = report.tables;
    j["seed"] = report.seed;
    j["fingerprint"] = report.fingerprint;
    j["now"] = report.now;
    j["R_sim"] = row.radii.sim;
    if (row.radii.age == std::numeric_limits<Tick>::max()) {
      j["R_age"] = nullptr;
    } else {
      j["R_age"] = row.radii.age;
    }
    j["R_quality"] = row.radii.quality;
    j["R_pop"] = row.radii.pop ? nlohmann::ordered_json(*row.radii.pop) : nlohmann::ordered_json(nullptr);
    j["recall"] = row.recall ? nlohmann::ordered_json(*row.recall) : nlohmann::ordered_json(nullptr);
    j["std_error"] = row.std_error;
    j["n_queries"] = row.n_queries;
    j["n_skipped"] = row.n_skipped;
    j["ideal_sizes"] = row.ideal_sizes;
    j["approx_sizes"] = row.approx_sizes;
    out << j.dump() << '\n';
  }
}

void write_report_csv(std::ostream& out, const RecallReport& report) {
  for (const auto& row : report.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", report.policy, report.k, report.tables, report.parameter,
                       row.radii.sim, format_age(row.radii.age), row.radii.quality,
                       row.radii.pop ? fmt::format("{}", *row.radii.pop) : std::string(),
                       row.recall ? fmt::format("{}", *row.recall) : std::string(), row.n_queries, row.n_skipped);
  }
}

}  // namespace streamlsh
