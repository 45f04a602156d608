#include "streamlsh/snapshot.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/core.h>

#include "streamlsh/corpus.hpp"
#include "streamlsh/error.hpp"

namespace streamlsh {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kVersion = 1;

ordered_json item_json(const StoredItem& item) {
  ordered_json j;
  j["id"] = item.id;
  j["tick"] = item.tick;
  j["seq"] = item.seq;
  j["quality"] = item.quality;
  j["copies"] = item.copies;
  auto& v = j["vector"] = ordered_json::array();
  for (const auto& e : item.vector.entries()) v.push_back({e.index, e.weight});
  return j;
}

StoredItem item_from_json(const json& j, const LshFamily& family) {
  StoredItem item;
  item.id = j.at("id").get<std::string>();
  item.tick = j.at("tick").get<Tick>();
  item.seq = j.at("seq").get<std::uint64_t>();
  item.quality = j.at("quality").get<double>();
  item.copies = j.at("copies").get<std::uint32_t>();
  std::vector<SparseVector::Entry> entries;
  for (const auto& pair : j.at("vector")) entries.push_back({pair.at(0).get<std::uint32_t>(), pair.at(1).get<double>()});
  item.vector = SparseVector::from_entries(std::move(entries));
  item.sketches = family.sketches(item.vector);
  return item;
}

}  // namespace

struct SnapshotCodec {
  static void save(std::ostream& out, const StreamIndex& index, const Vocabulary* vocabulary,
                   const ordered_json& config) {
    write_config_header(out, config);
    const auto& cfg = index.config_;
    ordered_json h;
    h["version"] = kVersion;
    h["k"] = cfg.k;
    h["L"] = cfg.tables;
    h["seed"] = cfg.seed;
    h["hash_seed"] = index.family().seed();
    h["policy"] = format_policy(cfg.policy);
    h["quality_sensitive"] = cfg.quality_sensitive;
    if (cfg.dynapop) {
      h["dynapop"] = {{"u", cfg.dynapop->insertion},
                      {"alpha", cfg.dynapop->decay},
                      {"evicted_cache", cfg.dynapop->evicted_cache}};
    } else {
      h["dynapop"] = nullptr;
    }
    h["next_tick"] = index.next_tick_;
    h["now"] = index.now_ ? ordered_json(*index.now_) : ordered_json(nullptr);
    h["next_seq"] = index.next_seq_;
    h["slots"] = index.slots_.size();
    h["free"] = index.free_;
    const auto clock = index.ledger_ ? index.ledger_->clock() : std::nullopt;
    h["ledger_clock"] = clock ? ordered_json(*clock) : ordered_json(nullptr);
    out << ordered_json{{"snapshot", h}}.dump() << '\n';

    if (vocabulary) {
      ordered_json v;
      v["document_count"] = vocabulary->document_count();
      v["terms"] = vocabulary->terms();
      v["df"] = vocabulary->document_frequencies();
      out << ordered_json{{"vocabulary", v}}.dump() << '\n';
    }
    for (std::size_t h_ = 0; h_ < index.slots_.size(); ++h_) {
      if (!index.slots_[h_]) continue;
      auto j = item_json(*index.slots_[h_]);
      j["handle"] = h_;
      out << ordered_json{{"item", j}}.dump() << '\n';
    }
    for (const auto& item : index.cache_) out << ordered_json{{"cached", item_json(item)}}.dump() << '\n';
    for (std::size_t t = 0; t < index.tables_.size(); ++t) {
      ordered_json rows = ordered_json::array();
      for (const auto& e : index.tables_.table(t).entries()) rows.push_back({e.item, e.touched});
      out << ordered_json{{"entries", {{"table", t}, {"rows", rows}}}}.dump() << '\n';
    }
    if (index.ledger_) {
      for (const auto& [id, state] : index.ledger_->export_states()) {
        out << ordered_json{{"pop", {{"id", id}, {"sum", state.sum}, {"last", state.last}}}}.dump() << '\n';
      }
    }
  }

  static Snapshot load(std::istream& in) {
    Snapshot snap;
    std::string line;
    std::size_t number = 0;
    StreamIndex* index = nullptr;
    try {
      while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = json::parse(line);
        if (j.contains("config")) {
          snap.config = ordered_json::parse(line).at("config");
          continue;
        }
        if (j.contains("snapshot")) {
          const auto& h = j.at("snapshot");
          if (h.at("version").get<int>() != kVersion) throw ParseError("unsupported snapshot version", number);
          StreamIndexConfig cfg;
          cfg.k = h.at("k").get<unsigned>();
          cfg.tables = h.at("L").get<unsigned>();
          cfg.seed = h.at("seed").get<std::uint64_t>();
          cfg.policy = parse_policy(h.at("policy").get<std::string>());
          cfg.quality_sensitive = h.at("quality_sensitive").get<bool>();
          if (!h.at("dynapop").is_null()) {
            const auto& d = h.at("dynapop");
            cfg.dynapop = DynaPopConfig{d.at("u").get<double>(), d.at("alpha").get<double>(),
                                        d.at("evicted_cache").get<std::size_t>()};
          }
          auto family = std::make_shared<const LshFamily>(cfg.k, cfg.tables, h.at("hash_seed").get<std::uint64_t>());
          snap.index = std::make_unique<StreamIndex>(cfg, std::move(family), h.at("next_tick").get<Tick>());
          index = snap.index.get();
          if (!h.at("now").is_null()) index->now_ = h.at("now").get<Tick>();
          index->next_seq_ = h.at("next_seq").get<std::uint64_t>();
          index->slots_.resize(h.at("slots").get<std::size_t>());
          index->free_ = h.at("free").get<std::vector<ItemHandle>>();
          if (index->ledger_ && !h.at("ledger_clock").is_null()) {
            index->ledger_->restore_clock(h.at("ledger_clock").get<Tick>());
          }
          continue;
        }
        if (j.contains("vocabulary")) {
          const auto& v = j.at("vocabulary");
          snap.vocabulary.emplace(v.at("terms").get<std::vector<std::string>>(),
                                  v.at("df").get<std::vector<std::uint32_t>>(), v.at("document_count").get<std::uint64_t>());
          continue;
        }
        if (!index) throw ParseError("record precedes the snapshot header", number);
        if (j.contains("item")) {
          const auto& it = j.at("item");
          const auto handle = it.at("handle").get<ItemHandle>();
          if (handle >= index->slots_.size() || index->slots_[handle]) throw ParseError("bad item handle", number);
          StoredItem item = item_from_json(it, index->family());
          index->live_.emplace(item.id, handle);
          index->slots_[handle] = std::move(item);
        } else if (j.contains("cached")) {
          StoredItem item = item_from_json(j.at("cached"), index->family());
          std::string id = item.id;
          index->cache_.push_back(std::move(item));
          index->cache_index_.emplace(std::move(id), std::prev(index->cache_.end()));
        } else if (j.contains("entries")) {
          const auto& e = j.at("entries");
          const auto t = e.at("table").get<std::size_t>();
          if (t >= index->tables_.size()) throw ParseError("bad table number", number);
          for (const auto& row : e.at("rows")) {
            const auto handle = row.at(0).get<ItemHandle>();
            if (handle >= index->slots_.size() || !index->slots_[handle]) throw ParseError("entry for unknown item", number);
            const StoredItem& item = *index->slots_[handle];
            index->tables_.insert(t, TableEntry{handle, item.sketches[t], item.tick, item.seq, row.at(1).get<Tick>()});
          }
        } else if (j.contains("pop")) {
          if (!index->ledger_) throw ParseError("popularity state without DynaPop", number);
          const auto& p = j.at("pop");
          index->ledger_->restore(p.at("id").get<std::string>(),
                                  PopularityLedger::State{p.at("sum").get<double>(), p.at("last").get<Tick>()});
        } else {
          throw ParseError("unknown snapshot record", number);
        }
      }
    } catch (const json::exception& e) {
      throw ParseError(e.what(), number);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), number);
    }
    if (!index) throw ParseError("missing snapshot header", number);
    for (std::size_t h = 0; h < index->slots_.size(); ++h) {
      if (!index->slots_[h]) continue;
      std::uint32_t copies = 0;
      for (std::size_t t = 0; t < index->tables_.size(); ++t) copies += index->tables_.table(t).contains(static_cast<ItemHandle>(h));
      if (copies != index->slots_[h]->copies) throw ParseError(fmt::format("copy count mismatch for '{}'", index->slots_[h]->id), number);
    }
    return snap;
  }
};

void save_snapshot(std::ostream& out, const StreamIndex& index, const Vocabulary* vocabulary, const ordered_json& config) {
  SnapshotCodec::save(out, index, vocabulary, config);
}

Snapshot load_snapshot(std::istream& in) { return SnapshotCodec::load(in); }

void save_snapshot_file(const std::string& path, const StreamIndex& index, const Vocabulary* vocabulary,
                        const ordered_json& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path));
  save_snapshot(out, index, vocabulary, config);
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

Snapshot load_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return load_snapshot(in);
}

}  // namespace streamlsh
