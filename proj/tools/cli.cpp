#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "streamlsh/analysis.hpp"
#include "streamlsh/corpus.hpp"
#include "streamlsh/error.hpp"
#include "streamlsh/exact_index.hpp"
#include "streamlsh/experiment.hpp"
#include "streamlsh/recall.hpp"
#include "streamlsh/snapshot.hpp"
#include "streamlsh/sweep.hpp"
#include "streamlsh/synthetic.hpp"

namespace streamlsh::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

enum CommandTag : std::uint64_t { kGenerate = 1, kRun = 2, kEval = 3 };

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out = ".";
};

struct GeneratorOptions {
  SyntheticSpec spec;
  std::string quality = "constant:1";

  SyntheticSpec resolve(std::uint64_t seed) const {
    SyntheticSpec s = spec;
    s.seed = derive_seed(seed, {kGenerate});
    s.quality = QualitySpec::parse(quality);
    s.validate();
    return s;
  }

  ordered_json to_json() const {
    return {{"ticks", spec.ticks},
            {"first_tick", spec.first_tick},
            {"items_per_tick", spec.items_per_tick},
            {"clusters", spec.clusters},
            {"dimensions", spec.dimensions},
            {"center_terms", spec.center_terms},
            {"noise_terms", spec.noise_terms},
            {"min_similarity", spec.min_similarity},
            {"skew", spec.skew},
            {"lifetime", spec.lifetime},
            {"quality", quality}};
  }
};

struct IndexOptions {
  unsigned k = 10;
  unsigned tables = 15;
  bool insensitive = false;
  bool dynapop = false;
  double insertion = 1.0;
  double decay = 0.95;
  std::size_t evicted_cache = 1 << 16;
  std::uint64_t followers_norm = 0;

  StreamIndexConfig config(const RetentionPolicy& policy, std::uint64_t seed) const {
    StreamIndexConfig c;
    c.k = k;
    c.tables = tables;
    c.policy = policy;
    c.seed = seed;
    c.quality_sensitive = !insensitive;
    if (dynapop) c.dynapop = DynaPopConfig{insertion, decay, evicted_cache};
    c.validate();
    return c;
  }

  QualityRule quality_rule() const {
    QualityRule rule;
    if (followers_norm > 0) rule.followers_norm = followers_norm;
    return rule;
  }

  ordered_json to_json() const {
    ordered_json j = {{"k", k}, {"L", tables}, {"quality_sensitive", !insensitive}, {"followers_norm", followers_norm}};
    if (dynapop) {
      j["dynapop"] = {{"u", insertion}, {"alpha", decay}, {"evicted_cache", evicted_cache}};
    } else {
      j["dynapop"] = nullptr;
    }
    return j;
  }
};

struct RunOptions {
  std::string corpus;
  std::string interest;
  std::string policy = "smooth:0.95";
  IndexOptions index;
};

struct QueryOptions {
  std::string snapshot;
  std::string text;
  std::string vector;
  double r_sim = 0.0;
  std::optional<Tick> r_age;
  double r_quality = 0.0;
  std::optional<double> r_pop;
};

struct AnalyzeOptions {
  std::vector<std::string> presets;
  std::string function;
  std::vector<std::string> grid;
  bool list = false;
};

struct EvalOptions {
  std::string corpus;
  bool synthetic = false;
  GeneratorOptions generator;
  IndexOptions index;
  std::vector<std::string> policies{"smooth:0.95", "threshold:auto", "bucket:auto"};
  double train_fraction = 0.8;
  std::size_t queries = 3000;
  std::vector<double> r_sim{0.9};
  std::vector<Tick> r_age{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<double> r_quality{0.0};
  std::vector<double> r_pop;
  double tolerance = 0.1;
  double interest_probability = 0.1;
  std::size_t top_n = 10;
};

fs::path output_dir(const GlobalOptions& g) {
  fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", g.out, ec.message()));
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

ordered_json header(std::string_view command, const GlobalOptions& g, ordered_json options) {
  return {{"command", command}, {"seed", g.seed}, {"options", std::move(options)}};
}

std::vector<SparseVector::Entry> parse_vector_text(std::string_view text) {
  std::vector<SparseVector::Entry> entries;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto pair = text.substr(start, end - start);
    const auto colon = pair.find(':');
    if (colon == std::string_view::npos) throw ValidationError(fmt::format("bad vector entry '{}', want index:weight", pair));
    try {
      entries.push_back({static_cast<std::uint32_t>(std::stoul(std::string(pair.substr(0, colon)))),
                         std::stod(std::string(pair.substr(colon + 1)))});
    } catch (const std::logic_error&) {
      throw ValidationError(fmt::format("bad vector entry '{}'", pair));
    }
    start = end + 1;
  }
  return entries;
}

std::vector<InterestEvent> read_events(const std::string& path) {
  return path.empty() ? std::vector<InterestEvent>{} : read_interest_file(path);
}

std::string policy_parameter(const RetentionPolicy& policy) {
  const auto text = format_policy(policy);
  return text.substr(text.find(':') + 1);
}

// ---------------------------------------------------------------- generate

int cmd_generate(const GlobalOptions& g, const GeneratorOptions& opts, std::ostream& out) {
  const auto spec = opts.resolve(g.seed);
  const auto dir = output_dir(g);
  const auto records = generate_corpus(spec);
  const auto path = dir / "corpus.jsonl";
  auto file = open_output(path);
  write_config_header(file, header("generate", g, opts.to_json()));
  for (const auto& r : records) write_corpus_record(file, r);
  finish(file, path);
  out << fmt::format("wrote {} records to {}\n", records.size(), path.string());
  return kOk;
}

// --------------------------------------------------------------------- run

int cmd_run(const GlobalOptions& g, const RunOptions& opts, std::ostream& out) {
  const auto policy = parse_policy(opts.policy);
  const auto config = opts.index.config(policy, derive_seed(g.seed, {kRun}));
  const auto records = read_corpus_file(opts.corpus);
  const auto events = read_events(opts.interest);
  const auto dir = output_dir(g);

  const Vocabulary vocab = build_vocabulary(records);
  const auto items = to_items(records, vocab, opts.index.quality_rule());
  const Tick first = std::min(items.empty() ? Tick{0} : items.front().tick,
                              events.empty() ? std::numeric_limits<Tick>::max() : events.front().tick);
  std::uint32_t extent = 0;
  for (const auto& item : items) extent = std::max(extent, item.vector.extent());
  StreamIndex index(config, default_family(config, extent), items.empty() && events.empty() ? 0 : first);

  auto options = opts.index.to_json();
  options["corpus"] = opts.corpus;
  options["interest"] = opts.interest;
  options["policy"] = format_policy(policy);
  const auto head = header("run", g, options);

  const auto stats_path = dir / "stats.jsonl";
  auto stats_file = open_output(stats_path);
  write_config_header(stats_file, head);
  std::size_t ticks = 0;
  replay(index, items, events, std::nullopt, [&](const TickStats& s) {
    stats_file << to_json(s).dump() << '\n';
    ++ticks;
  });
  finish(stats_file, stats_path);

  const auto snapshot_path = dir / "snapshot.jsonl";
  save_snapshot_file(snapshot_path.string(), index, vocab.size() ? &vocab : nullptr, head);
  out << fmt::format("replayed {} items over {} ticks; {} entries in {} tables\n", items.size(), ticks,
                     index.total_entries(), config.tables);
  return kOk;
}

// ------------------------------------------------------------------- query

int cmd_query(const GlobalOptions& g, const QueryOptions& opts, std::ostream& out) {
  if (opts.text.empty() == opts.vector.empty()) throw ValidationError("give exactly one of --text and --vector");
  RadiusParams radii;
  radii.sim = opts.r_sim;
  if (opts.r_age) radii.age = *opts.r_age;
  radii.quality = opts.r_quality;
  radii.pop = opts.r_pop;
  radii.validate();

  const auto snap = load_snapshot_file(opts.snapshot);
  const StreamIndex& index = *snap.index;
  SparseVector query;
  if (!opts.text.empty()) {
    if (!snap.vocabulary) throw ValidationError("snapshot has no vocabulary; query with --vector");
    query = snap.vocabulary->vectorize(tokenize(opts.text));
  } else {
    query = SparseVector::from_entries(parse_vector_text(opts.vector));
  }
  if (query.norm() == 0.0) throw DomainError("query has a zero vector");
  if (radii.pop && !index.popularity()) throw ValidationError("R_pop needs a snapshot built with DynaPop");

  const Tick now = index.now().value_or(0);
  struct Hit {
    const StoredItem* item;
    double similarity;
  };
  std::vector<Hit> hits;
  for (ItemHandle h : index.lookup(query)) {
    const StoredItem& item = index.item(h);
    const double sim = angular_similarity(query, item.vector);
    if (within_radius(radii, sim, item.tick, item.quality, now, index.popularity(), item.id)) hits.push_back({&item, sim});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.item->id < b.item->id;
  });

  ordered_json options = {{"snapshot", opts.snapshot}, {"text", opts.text},      {"vector", opts.vector},
                          {"r_sim", opts.r_sim},       {"r_quality", opts.r_quality}};
  options["r_age"] = opts.r_age ? ordered_json(*opts.r_age) : ordered_json(nullptr);
  options["r_pop"] = opts.r_pop ? ordered_json(*opts.r_pop) : ordered_json(nullptr);

  const auto dir = output_dir(g);
  const auto path = dir / "results.jsonl";
  auto file = open_output(path);
  write_config_header(file, header("query", g, options));
  for (const auto& hit : hits) {
    ordered_json j = {{"id", hit.item->id},
                      {"similarity", hit.similarity},
                      {"age", now - hit.item->tick},
                      {"quality", hit.item->quality}};
    if (index.popularity()) j["pop"] = index.popularity()->pop(hit.item->id, now);
    const auto line = j.dump();
    file << line << '\n';
    out << line << '\n';
  }
  finish(file, path);
  return kOk;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(const GlobalOptions& g, const AnalyzeOptions& opts, std::ostream& out) {
  if (opts.list) {
    for (const auto& f : analysis::sweep_functions()) {
      std::string params;
      for (const auto& p : analysis::sweep_parameters(f)) params += (params.empty() ? "" : ",") + p;
      out << fmt::format("function {} ({})\n", f, params);
    }
    for (const auto& p : analysis::preset_names()) out << "preset " << p << '\n';
    return kOk;
  }
  std::vector<analysis::SweepSpec> specs;
  for (const auto& name : opts.presets) {
    auto more = analysis::preset(name);
    specs.insert(specs.end(), more.begin(), more.end());
  }
  if (!opts.function.empty()) {
    analysis::SweepSpec spec{opts.function, {}};
    for (const auto& axis : opts.grid) spec.grid.push_back(analysis::parse_grid_axis(axis));
    specs.push_back(std::move(spec));
  } else if (!opts.grid.empty()) {
    throw ValidationError("--grid needs --function");
  }
  if (specs.empty()) throw ValidationError("nothing to analyze: give --preset or --function");
  const auto table = analysis::run_sweeps(specs);

  const ordered_json options = {{"presets", opts.presets}, {"function", opts.function}, {"grid", opts.grid}};
  const auto dir = output_dir(g);
  const auto path = dir / "sweep.csv";
  auto file = open_output(path);
  file << "# " << ordered_json{{"config", header("analyze", g, options)}}.dump() << '\n';
  table.write_csv(file);
  finish(file, path);
  out << fmt::format("wrote {} rows to {}\n", table.rows.size(), path.string());
  return kOk;
}

// -------------------------------------------------------------------- eval

struct PolicyPlan {
  std::string spec;
  std::optional<RetentionPolicy> policy;  // nullopt while "auto"
  bool bucket_auto = false;
};

std::vector<RadiusParams> radius_grid(const EvalOptions& opts) {
  if (opts.r_sim.empty() || opts.r_age.empty() || opts.r_quality.empty()) {
    throw ValidationError("radius grid needs at least one R_sim, R_age and R_quality");
  }
  std::vector<std::optional<double>> pops;
  if (opts.r_pop.empty()) pops.push_back(std::nullopt);
  for (double p : opts.r_pop) pops.push_back(p);
  std::vector<RadiusParams> grid;
  for (double s : opts.r_sim) {
    for (Tick a : opts.r_age) {
      for (double q : opts.r_quality) {
        for (const auto& p : pops) {
          RadiusParams r{s, a, q, p};
          r.validate();
          grid.push_back(r);
        }
      }
    }
  }
  return grid;
}

int cmd_eval(const GlobalOptions& g, const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  // Validate everything before any work starts.
  if (opts.corpus.empty() == !opts.synthetic) throw ValidationError("give exactly one of --corpus and --synthetic");
  if (!(opts.tolerance >= 0.0)) throw ValidationError("capacity tolerance must be non-negative");
  if (opts.queries == 0) throw ValidationError("query sample size must be positive");
  if (!opts.r_pop.empty() && !opts.index.dynapop) throw ValidationError("R_pop radii need --dynapop");
  if (opts.policies.empty()) throw ValidationError("no policies to evaluate");
  const auto radii = radius_grid(opts);
  std::vector<PolicyPlan> plans;
  for (const auto& text : opts.policies) {
    PolicyPlan plan{text, std::nullopt, false};
    if (text == "bucket:auto") {
      plan.bucket_auto = true;
    } else if (text != "threshold:auto") {
      plan.policy = parse_policy(text);
    }
    plans.push_back(std::move(plan));
  }
  opts.index.config(SmoothPolicy{0.5}, 0);
  const auto generator = opts.synthetic ? std::optional(opts.generator.resolve(g.seed)) : std::nullopt;
  const auto dir = output_dir(g);

  const auto records = generator ? generate_corpus(*generator) : read_corpus_file(opts.corpus);
  std::vector<Tick> ticks;
  for (const auto& r : records) ticks.push_back(r.tick);
  Rng split_rng(derive_seed(g.seed, {kEval, 1}));
  const auto split = split_and_sample(ticks, opts.train_fraction, opts.queries, split_rng);

  const std::span<const CorpusRecord> train_records(records.data(), split.train_end);
  const Vocabulary vocab = build_vocabulary(train_records);
  const auto rule = opts.index.quality_rule();
  std::vector<Item> train = to_items(train_records, vocab, rule);
  std::vector<SparseVector> queries;
  for (auto pos : split.queries) {
    try {
      queries.push_back(to_item(records[pos], vocab, rule).vector);
    } catch (const DomainError&) {
      // out-of-vocabulary query; counted below
    }
  }
  if (queries.empty()) throw ProtocolError("no sampled query could be vectorized");
  const std::size_t unvectorized = split.queries.size() - queries.size();

  std::vector<InterestEvent> events;
  std::size_t stream_end = train.size();
  if (opts.index.dynapop) {
    Rng interest_rng(derive_seed(g.seed, {kEval, 2}));
    auto interest = synthesize_interest(train, opts.interest_probability, opts.top_n, interest_rng);
    stream_end = interest.stream_end;
    events = std::move(interest.events);
  }
  const std::span<const Item> stream(train.data(), stream_end);
  if (stream.empty()) throw ProtocolError("empty item stream");
  const ExactIndex exact(std::vector<Item>(stream.begin(), stream.end()));

  const double span_ticks = static_cast<double>(stream.back().tick - stream.front().tick + 1);
  const double arrivals = static_cast<double>(stream.size()) / span_ticks;
  double quality_sum = 0.0;
  for (const auto& item : stream) quality_sum += opts.index.insensitive ? 1.0 : item.quality;
  const double mean_quality = quality_sum / static_cast<double>(stream.size());

  std::optional<double> reference;
  for (const auto& plan : plans) {
    if (plan.policy) reference = expected_capacity(*plan.policy, arrivals, mean_quality, opts.index.tables);
    if (reference) break;
  }
  for (auto& plan : plans) {
    if (plan.policy || plan.bucket_auto) continue;
    if (!reference) throw ValidationError("threshold:auto needs a Smooth or sized Threshold policy to match");
    plan.policy = ThresholdPolicy{std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(*reference / opts.index.tables)))};
  }
  for (const auto& plan : plans) {
    if (!plan.policy || !reference) continue;
    if (auto cap = expected_capacity(*plan.policy, arrivals, mean_quality, opts.index.tables)) {
      analysis::require_equal_capacity(*cap, *reference, opts.tolerance, plan.spec);
    }
  }

  auto family = std::make_shared<LshFamily>(opts.index.k, opts.index.tables, derive_seed(g.seed, {kEval, 3}));
  std::uint32_t extent = 0;
  for (const auto& item : stream) extent = std::max(extent, item.vector.extent());
  family->materialize(extent);
  const std::shared_ptr<const LshFamily> shared = family;

  ordered_json options = opts.index.to_json();
  options["corpus"] = opts.corpus;
  options["synthetic"] = generator ? opts.generator.to_json() : ordered_json(nullptr);
  options["policies"] = opts.policies;
  options["train_fraction"] = opts.train_fraction;
  options["queries"] = opts.queries;
  options["r_sim"] = opts.r_sim;
  options["r_age"] = opts.r_age;
  options["r_quality"] = opts.r_quality;
  options["r_pop"] = opts.r_pop;
  options["tolerance"] = opts.tolerance;
  options["interest_probability"] = opts.interest_probability;
  options["top_n"] = opts.top_n;
  const auto head = header("eval", g, options);
  const auto config_fingerprint = fingerprint(head.dump());

  std::vector<RecallReport> reports;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    auto& plan = plans[i];
    const auto seed = derive_seed(g.seed, {kEval, 4, i});
    if (plan.bucket_auto) {
      if (!reference) throw ValidationError("bucket:auto needs a Smooth or sized Threshold policy to match");
      const auto base = opts.index.config(BucketPolicy{1}, seed);
      plan.policy = BucketPolicy{calibrate_bucket_size(base, shared, stream, events, *reference)};
    }
    const auto config = opts.index.config(*plan.policy, seed);
    StreamIndex index(config, shared, stream.front().tick);
    const double measured = replay_steady_size(index, stream, events);
    if (std::holds_alternative<BucketPolicy>(*plan.policy)) {
      if (!reference) {
        reference = measured;
      } else {
        analysis::require_equal_capacity(measured, *reference, opts.tolerance, format_policy(*plan.policy));
      }
    }
    RecallReport report;
    report.policy = std::string(policy_name(*plan.policy));
    report.parameter = policy_parameter(*plan.policy);
    report.k = config.k;
    report.tables = config.tables;
    report.seed = g.seed;
    report.fingerprint = config_fingerprint;
    report.now = index.now().value_or(0);
    report.rows = recall_at_radius(exact, index, queries, radii, report.now, index.popularity());
    err << fmt::format("{}: steady size {:.0f} (target {:.0f})\n", format_policy(*plan.policy), measured,
                       reference.value_or(measured));
    reports.push_back(std::move(report));
  }

  const auto jsonl_path = dir / "recall.jsonl";
  auto jsonl = open_output(jsonl_path);
  write_config_header(jsonl, head);
  for (const auto& r : reports) write_report_jsonl(jsonl, r);
  finish(jsonl, jsonl_path);

  const auto csv_path = dir / "recall.csv";
  auto csv = open_output(csv_path);
  csv << "# " << ordered_json{{"config", head}}.dump() << '\n' << kRecallCsvHeader << '\n';
  out << kRecallCsvHeader << '\n';
  for (const auto& r : reports) {
    write_report_csv(csv, r);
    write_report_csv(out, r);
  }
  finish(csv, csv_path);
  if (unvectorized) err << fmt::format("{} sampled queries had no in-vocabulary terms\n", unvectorized);
  return kOk;
}

// ----------------------------------------------------------------- options

void add_generator_options(CLI::App* cmd, GeneratorOptions& o) {
  cmd->add_option("--ticks", o.spec.ticks, "Number of ticks")->capture_default_str();
  cmd->add_option("--first-tick", o.spec.first_tick, "Tick of the first item")->capture_default_str();
  cmd->add_option("--items-per-tick", o.spec.items_per_tick, "Arrivals per tick (mu)")->capture_default_str();
  cmd->add_option("--clusters", o.spec.clusters, "Planted clusters")->capture_default_str();
  cmd->add_option("--dimensions", o.spec.dimensions, "Vector dimensions")->capture_default_str();
  cmd->add_option("--center-terms", o.spec.center_terms, "Non-zeros per cluster center")->capture_default_str();
  cmd->add_option("--noise-terms", o.spec.noise_terms, "Noise non-zeros per item")->capture_default_str();
  cmd->add_option("--min-similarity", o.spec.min_similarity, "Lowest item-to-center similarity")->capture_default_str();
  cmd->add_option("--skew", o.spec.skew, "Zipf exponent of cluster popularity")->capture_default_str();
  cmd->add_option("--lifetime", o.spec.lifetime, "Width in ticks of each cluster's popularity burst (0: stationary)")
      ->capture_default_str();
  cmd->add_option("--quality", o.quality, "constant:v | uniform:lo:hi | followers:mean")->capture_default_str();
}

void add_index_options(CLI::App* cmd, IndexOptions& o) {
  cmd->add_option("-k,--k", o.k, "Bits per sketch")->capture_default_str();
  cmd->add_option("-L,--tables", o.tables, "Hash tables")->capture_default_str();
  cmd->add_flag("--quality-insensitive", o.insensitive, "Insert every item into every table");
  cmd->add_flag("--dynapop", o.dynapop, "Re-index items on interest events");
  cmd->add_option("--u", o.insertion, "DynaPop insertion factor")->capture_default_str();
  cmd->add_option("--alpha", o.decay, "Interest decay")->capture_default_str();
  cmd->add_option("--evicted-cache", o.evicted_cache, "Evicted items kept for re-indexing")->capture_default_str();
  cmd->add_option("--followers-norm", o.followers_norm, "N_f for follower-based quality (0 disables)")
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"streamlsh: similarity search over item streams"};
  app.set_config("--config", "", "INI config file; [command] sections hold command options");
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--seed", global.seed, "Top-level random seed")->capture_default_str();
  app.add_option("--out", global.out, "Output directory")->capture_default_str();

  GeneratorOptions generate;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic planted-cluster corpus");
  add_generator_options(gen_cmd, generate);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Replay a corpus through the index");
  run_cmd->add_option("--corpus", run_opts.corpus, "Corpus file")->required();
  run_cmd->add_option("--interest", run_opts.interest, "Interest stream file");
  run_cmd->add_option("--policy", run_opts.policy, "threshold:T | bucket:B | smooth:p")->capture_default_str();
  add_index_options(run_cmd, run_opts.index);

  QueryOptions query;
  auto* query_cmd = app.add_subcommand("query", "Query an index snapshot");
  query_cmd->add_option("--snapshot", query.snapshot, "Snapshot written by run")->required();
  query_cmd->add_option("--text", query.text, "Query text");
  query_cmd->add_option("--vector", query.vector, "Query vector as index:weight,...");
  query_cmd->add_option("--r-sim", query.r_sim, "Similarity radius")->capture_default_str();
  query_cmd->add_option("--r-age", query.r_age, "Age radius (unbounded when omitted)");
  query_cmd->add_option("--r-quality", query.r_quality, "Quality radius")->capture_default_str();
  query_cmd->add_option("--r-pop", query.r_pop, "Popularity radius");

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Evaluate closed forms over a parameter grid");
  analyze_cmd->add_option("--preset", analyze.presets, "Preset sweep (repeatable)");
  analyze_cmd->add_option("--function", analyze.function, "Function to sweep");
  analyze_cmd->add_option("--grid", analyze.grid, "Axis name=v1,v2 or name=start:stop:step (repeatable)");
  analyze_cmd->add_flag("--list", analyze.list, "List functions and presets");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Measure recall at radius against brute force");
  eval_cmd->add_option("--corpus", eval.corpus, "Corpus file");
  eval_cmd->add_flag("--synthetic", eval.synthetic, "Generate the corpus from the generator options");
  add_generator_options(eval_cmd, eval.generator);
  add_index_options(eval_cmd, eval.index);
  eval_cmd->add_option("--policies", eval.policies, "Policies; threshold:auto and bucket:auto match capacity")
      ->delimiter(',')
      ->capture_default_str();
  eval_cmd->add_option("--train-fraction", eval.train_fraction, "Train share of the corpus")->capture_default_str();
  eval_cmd->add_option("--queries", eval.queries, "Query sample size")->capture_default_str();
  eval_cmd->add_option("--r-sim", eval.r_sim, "Similarity radii")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--r-age", eval.r_age, "Age radii")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--r-quality", eval.r_quality, "Quality radii")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--r-pop", eval.r_pop, "Popularity radii (DynaPop only)")->delimiter(',');
  eval_cmd->add_option("--tolerance", eval.tolerance, "Allowed relative capacity mismatch")->capture_default_str();
  eval_cmd->add_option("--interest-probability", eval.interest_probability, "Query sampling rate for interest")
      ->capture_default_str();
  eval_cmd->add_option("--top-n", eval.top_n, "Interesting items per sampled query")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*gen_cmd) return cmd_generate(global, generate, out);
    if (*run_cmd) return cmd_run(global, run_opts, out);
    if (*query_cmd) return cmd_query(global, query, out);
    if (*analyze_cmd) return cmd_analyze(global, analyze, out);
    if (*eval_cmd) return cmd_eval(global, eval, out, err);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kValidation;
  } catch (const ProtocolError& e) {
    err << "protocol error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace streamlsh::cli
