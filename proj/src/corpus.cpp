#include "streamlsh/corpus.hpp"

#include <fstream>
#include <string>

#include <fmt/core.h>

#include "streamlsh/error.hpp"

namespace streamlsh {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(fmt::format("invalid JSON: {}", e.what()), number);
    }
    if (!record.is_object()) throw ParseError("record is not a JSON object", number);
    if (record.contains("config")) continue;
    try {
      fn(record, number);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), number);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), number);
    }
  }
}

Tick read_tick(const json& record, std::size_t line) {
  const auto& t = record.at("tick");
  if (!t.is_number_unsigned() && !(t.is_number_integer() && t.get<std::int64_t>() >= 0)) {
    throw ParseError("'tick' must be a non-negative integer", line);
  }
  return t.get<Tick>();
}

std::optional<double> read_quality(const json& record, std::size_t line) {
  if (!record.contains("quality")) return std::nullopt;
  const auto& q = record.at("quality");
  if (!q.is_number()) throw ParseError("'quality' must be a number", line);
  const double v = q.get<double>();
  if (!(v >= 0.0 && v <= 1.0)) throw ParseError(fmt::format("quality {} outside [0, 1]", v), line);
  return v;
}

}  // namespace

std::vector<CorpusRecord> read_corpus(std::istream& in) {
  std::vector<CorpusRecord> out;
  for_each_record(in, [&](const json& record, std::size_t line) {
    CorpusRecord r;
    if (!record.contains("id") || !record.at("id").is_string()) throw ParseError("'id' must be a string", line);
    r.id = record.at("id").get<std::string>();
    if (r.id.empty()) throw ParseError("'id' must not be empty", line);
    if (!record.contains("tick")) throw ParseError("missing 'tick'", line);
    r.tick = read_tick(record, line);
    const bool has_text = record.contains("text");
    const bool has_vector = record.contains("vector");
    if (has_text == has_vector) throw ParseError("exactly one of 'text' and 'vector' is required", line);
    if (has_text) {
      if (!record.at("text").is_string()) throw ParseError("'text' must be a string", line);
      r.text = record.at("text").get<std::string>();
    } else {
      std::vector<SparseVector::Entry> entries;
      for (const auto& pair : record.at("vector")) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number()) {
          throw ParseError("'vector' entries must be [index, weight] pairs", line);
        }
        entries.push_back({pair[0].get<std::uint32_t>(), pair[1].get<double>()});
      }
      r.vector = std::move(entries);
    }
    r.quality = read_quality(record, line);
    if (record.contains("followers")) {
      if (!record.at("followers").is_number_unsigned()) throw ParseError("'followers' must be a non-negative integer", line);
      r.followers = record.at("followers").get<std::uint64_t>();
    }
    if (!out.empty() && r.tick < out.back().tick) {
      throw ParseError(fmt::format("tick {} follows tick {}; corpus must be ordered by tick", r.tick, out.back().tick), line);
    }
    out.push_back(std::move(r));
  });
  return out;
}

void write_corpus_record(std::ostream& out, const CorpusRecord& record) {
  ordered_json j;
  j["id"] = record.id;
  j["tick"] = record.tick;
  if (record.text) j["text"] = *record.text;
  if (record.vector) {
    ordered_json pairs = ordered_json::array();
    for (const auto& e : *record.vector) pairs.push_back({e.index, e.weight});
    j["vector"] = std::move(pairs);
  }
  if (record.quality) j["quality"] = *record.quality;
  if (record.followers) j["followers"] = *record.followers;
  out << j.dump() << '\n';
}

std::vector<InterestEvent> read_interest(std::istream& in) {
  std::vector<InterestEvent> out;
  for_each_record(in, [&](const json& record, std::size_t line) {
    InterestEvent e;
    if (!record.contains("id") || !record.at("id").is_string()) throw ParseError("'id' must be a string", line);
    e.item_id = record.at("id").get<std::string>();
    if (!record.contains("tick")) throw ParseError("missing 'tick'", line);
    e.tick = read_tick(record, line);
    e.quality = read_quality(record, line);
    if (!out.empty() && e.tick < out.back().tick) {
      throw ParseError(fmt::format("tick {} follows tick {}; interest stream must be ordered by tick", e.tick,
                                   out.back().tick),
                       line);
    }
    out.push_back(std::move(e));
  });
  return out;
}

void write_interest_event(std::ostream& out, const InterestEvent& event) {
  ordered_json j;
  j["id"] = event.item_id;
  j["tick"] = event.tick;
  if (event.quality) j["quality"] = *event.quality;
  out << j.dump() << '\n';
}

void write_config_header(std::ostream& out, const ordered_json& config) {
  ordered_json j;
  j["config"] = config;
  out << j.dump() << '\n';
}

ordered_json to_json(const TickStats& stats) {
  ordered_json j;
  j["tick"] = stats.tick;
  j["table_sizes"] = stats.table_sizes;
  j["arrivals"] = stats.arrivals;
  j["inserted"] = stats.inserted;
  j["reinserted"] = stats.reinserted;
  j["refreshed"] = stats.refreshed;
  j["evicted"] = stats.evicted;
  j["interest_events"] = stats.interest_events;
  j["dropped_events"] = stats.dropped_events;
  return j;
}

std::vector<CorpusRecord> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open corpus '{}'", path));
  return read_corpus(in);
}

std::vector<InterestEvent> read_interest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open interest stream '{}'", path));
  return read_interest(in);
}

}  // namespace streamlsh
