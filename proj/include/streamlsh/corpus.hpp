#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamlsh/popularity.hpp"
#include "streamlsh/sparse_vector.hpp"
#include "streamlsh/stream_index.hpp"

namespace streamlsh {

/// One corpus line. Exactly one of `text` and `vector` is set.
struct CorpusRecord {
  std::string id;
  Tick tick = 0;
  std::optional<std::string> text;
  std::optional<std::vector<SparseVector::Entry>> vector;
  std::optional<double> quality;
  std::optional<std::uint64_t> followers;
};

/// Reads JSON-lines corpus records:
///   {"id": "...", "tick": 3, "text": "..." | "vector": [[i, w], ...],
///    "quality": 0.7, "followers": 120}
/// Blank lines and header objects carrying a "config" key are skipped.
/// Throws ParseError (with line number) on malformed lines or when ticks
/// decrease.
std::vector<CorpusRecord> read_corpus(std::istream& in);
void write_corpus_record(std::ostream& out, const CorpusRecord& record);

/// Interest lines: {"id": "...", "tick": 3[, "quality": 0.4]}, sorted by tick.
std::vector<InterestEvent> read_interest(std::istream& in);
void write_interest_event(std::ostream& out, const InterestEvent& event);

/// {"config": ...} header line carried by every output file.
void write_config_header(std::ostream& out, const nlohmann::ordered_json& config);

nlohmann::ordered_json to_json(const TickStats& stats);

std::vector<CorpusRecord> read_corpus_file(const std::string& path);
std::vector<InterestEvent> read_interest_file(const std::string& path);

}  // namespace streamlsh
