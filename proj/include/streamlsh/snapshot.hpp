#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "streamlsh/stream_index.hpp"
#include "streamlsh/vocabulary.hpp"

namespace streamlsh {

/// A restored index, with the vocabulary and config header it was saved with.
struct Snapshot {
  std::unique_ptr<StreamIndex> index;
  std::optional<Vocabulary> vocabulary;
  nlohmann::ordered_json config;
};

/// Writes the complete index state as JSON lines: config header, index
/// header, vocabulary, item store (live slots and evicted cache), table
/// entries in storage order and popularity states. Restoring yields an
/// index whose later behaviour is identical to the original's.
void save_snapshot(std::ostream& out, const StreamIndex& index, const Vocabulary* vocabulary,
                   const nlohmann::ordered_json& config);
/// Throws ParseError on malformed input.
Snapshot load_snapshot(std::istream& in);

void save_snapshot_file(const std::string& path, const StreamIndex& index, const Vocabulary* vocabulary,
                        const nlohmann::ordered_json& config);
Snapshot load_snapshot_file(const std::string& path);

}  // namespace streamlsh
