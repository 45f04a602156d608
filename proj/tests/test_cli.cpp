#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = streamlsh::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("streamlsh_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& file) const { return (path / file).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<json> lines(const std::string& path) {
  std::vector<json> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const std::vector<std::string> kSmallCorpus = {"--ticks", "30", "--items-per-tick", "20", "--clusters", "8",
                                               "--dimensions", "400"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("exit codes") {
  TempDir dir("codes");
  CHECK(run({}).code == streamlsh::cli::kValidation);
  CHECK(run({"frobnicate"}).code == streamlsh::cli::kValidation);
  CHECK(run({"generate", "--ticks", "many"}).code == streamlsh::cli::kValidation);
  CHECK(run({"--help"}).code == streamlsh::cli::kOk);
  CHECK(run({"--out", dir.path.string(), "run", "--corpus", dir / "missing.jsonl"}).code == streamlsh::cli::kIo);

  write(dir / "bad.jsonl", "{\"id\":\"a\",\"tick\":1,\"text\":\"x\"}\n{oops\n");
  const auto bad = run({"--out", dir.path.string(), "run", "--corpus", dir / "bad.jsonl"});
  CHECK(bad.code == streamlsh::cli::kIo);
  CHECK(bad.err.find("line 2") != std::string::npos);

  write(dir / "ok.jsonl", "{\"id\":\"a\",\"tick\":1,\"text\":\"x\"}\n");
  CHECK(run({"--out", dir.path.string(), "run", "--corpus", dir / "ok.jsonl", "--policy", "smooth:1.5"}).code ==
        streamlsh::cli::kValidation);
  CHECK(run({"--out", dir.path.string(), "run", "--corpus", dir / "ok.jsonl", "-k", "0"}).code ==
        streamlsh::cli::kValidation);
}

TEST_CASE("generate is deterministic and records its configuration") {
  TempDir a("gen_a"), b("gen_b"), c("gen_c");
  REQUIRE(run(with({"--seed", "5", "--out", a.path.string(), "generate"}, kSmallCorpus)).code == 0);
  REQUIRE(run(with({"--seed", "5", "--out", b.path.string(), "generate"}, kSmallCorpus)).code == 0);
  REQUIRE(run(with({"--seed", "6", "--out", c.path.string(), "generate"}, kSmallCorpus)).code == 0);
  const auto text = slurp(a / "corpus.jsonl");
  CHECK(text == slurp(b / "corpus.jsonl"));
  CHECK(text != slurp(c / "corpus.jsonl"));

  const auto records = lines(a / "corpus.jsonl");
  REQUIRE(records.size() == 601);
  CHECK(records[0]["config"]["command"] == "generate");
  CHECK(records[0]["config"]["seed"] == 5);
  CHECK(records[0]["config"]["options"]["ticks"] == 30);
  CHECK(records[600]["tick"] == 29);
}

TEST_CASE("run, then query the snapshot") {
  TempDir dir("run");
  const auto out = dir.path.string();
  write(dir / "corpus.jsonl",
        "{\"id\":\"a\",\"tick\":0,\"text\":\"red apple pie\"}\n"
        "{\"id\":\"b\",\"tick\":1,\"text\":\"green apple tart\"}\n"
        "{\"id\":\"c\",\"tick\":1,\"text\":\"blue whale song\"}\n"
        "{\"id\":\"d\",\"tick\":3,\"text\":\"red apple pie recipe\"}\n");
  REQUIRE(run({"--out", out, "run", "--corpus", dir / "corpus.jsonl", "--policy", "threshold:100"}).code == 0);
  const auto stats = lines(dir / "stats.jsonl");
  REQUIRE(stats.size() == 5);
  CHECK(stats[0]["config"]["options"]["policy"] == "threshold:100");
  CHECK(stats[3]["arrivals"] == 0);
  CHECK(stats[4]["tick"] == 3);

  const auto hit = run({"--out", out, "query", "--snapshot", dir / "snapshot.jsonl", "--text", "red apple pie"});
  REQUIRE(hit.code == 0);
  const auto results = lines(dir / "results.jsonl");
  REQUIRE(results.size() >= 2);
  CHECK(results[0]["config"]["command"] == "query");
  CHECK(results[1]["id"] == "a");
  CHECK(results[1]["similarity"] == doctest::Approx(1.0));
  CHECK(results[1]["age"] == 3);
  CHECK(hit.out.find("\"a\"") != std::string::npos);

  const auto recent = run({"--out", out, "query", "--snapshot", dir / "snapshot.jsonl", "--text", "red apple pie",
                           "--r-age", "0", "--r-sim", "0.5"});
  REQUIRE(recent.code == 0);
  for (const auto& r : lines(dir / "results.jsonl")) {
    if (!r.contains("config")) CHECK(r["id"] == "d");
  }

  CHECK(run({"--out", out, "query", "--snapshot", dir / "snapshot.jsonl", "--vector", "5:0"}).code ==
        streamlsh::cli::kValidation);
  CHECK(run({"--out", out, "query", "--snapshot", dir / "snapshot.jsonl", "--text", "x", "--vector", "1:1"}).code ==
        streamlsh::cli::kValidation);
  CHECK(run({"--out", out, "query", "--snapshot", dir / "snapshot.jsonl", "--text", "red", "--r-pop", "0.1"}).code ==
        streamlsh::cli::kValidation);
  CHECK(run({"--out", out, "query", "--snapshot", dir / "nothing.jsonl", "--text", "red"}).code ==
        streamlsh::cli::kIo);
}

TEST_CASE("threshold table sizes stay bounded") {
  TempDir dir("bounded");
  const auto out = dir.path.string();
  REQUIRE(run(with({"--out", out, "generate"}, kSmallCorpus)).code == 0);
  REQUIRE(run({"--out", out, "run", "--corpus", dir / "corpus.jsonl", "--policy", "threshold:50", "-L", "4"}).code == 0);
  const auto stats = lines(dir / "stats.jsonl");
  REQUIRE(stats.size() == 31);
  for (std::size_t i = 1; i < stats.size(); ++i) {
    REQUIRE(stats[i]["table_sizes"].size() == 4);
    for (const auto& n : stats[i]["table_sizes"]) CHECK(n.get<int>() <= 50);
  }
  CHECK(stats.back()["table_sizes"][0] == 50);
}

TEST_CASE("DynaPop with an empty interest stream matches a plain run") {
  TempDir dir("dynapop");
  const auto out = dir.path.string();
  REQUIRE(run(with({"--out", out, "generate"}, kSmallCorpus)).code == 0);
  write(dir / "interest.jsonl", "");
  REQUIRE(run({"--out", out, "run", "--corpus", dir / "corpus.jsonl", "--policy", "smooth:0.9"}).code == 0);
  const auto plain = lines(dir / "stats.jsonl");
  REQUIRE(run({"--out", out, "run", "--corpus", dir / "corpus.jsonl", "--policy", "smooth:0.9", "--dynapop",
               "--interest", dir / "interest.jsonl"})
              .code == 0);
  const auto dynapop = lines(dir / "stats.jsonl");
  REQUIRE(plain.size() == dynapop.size());
  for (std::size_t i = 1; i < plain.size(); ++i) CHECK(plain[i] == dynapop[i]);
}

TEST_CASE("analyze presets and custom grids") {
  TempDir dir("analyze");
  const auto out = dir.path.string();
  const auto listed = run({"analyze", "--list"});
  CHECK(listed.code == 0);
  CHECK(listed.out.find("preset fig4a") != std::string::npos);
  CHECK(listed.out.find("function sp_smooth") != std::string::npos);

  REQUIRE(run({"--out", out, "analyze", "--preset", "fig4a"}).code == 0);
  auto text = slurp(dir / "sweep.csv");
  CHECK(text.rfind("# {\"config\"", 0) == 0);

  REQUIRE(run({"--out", out, "analyze", "--function", "sp_smooth", "--grid", "s=0.9", "--grid", "a=0:4:1", "--grid",
               "p=0.95"})
              .code == 0);
  std::ifstream in(dir / "sweep.csv");
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  REQUIRE(rows.size() == 2 + 5);

  CHECK(run({"--out", out, "analyze", "--preset", "fig99"}).code == streamlsh::cli::kValidation);
  CHECK(run({"--out", out, "analyze"}).code == streamlsh::cli::kValidation);
  CHECK(run({"--out", out, "analyze", "--function", "sp_smooth", "--grid", "q=1"}).code ==
        streamlsh::cli::kValidation);
}

TEST_CASE("eval writes one row per policy and radius") {
  TempDir dir("eval");
  const auto out = dir.path.string();
  const std::vector<std::string> corpus = {"--ticks", "40", "--items-per-tick", "50", "--clusters", "20",
                                           "--dimensions", "2000"};
  const auto one = run(with({"--out", out, "eval", "--synthetic", "--policies", "smooth:0.9", "--r-age", "10",
                             "--queries", "50"},
                            corpus));
  REQUIRE(one.code == 0);
  const auto reports = lines(dir / "recall.jsonl");
  REQUIRE(reports.size() == 2);
  CHECK(reports[0]["config"]["command"] == "eval");
  CHECK(reports[1]["R_age"] == 10);
  CHECK(reports[1]["ideal_sizes"].size() == 50);
  std::ifstream csv(dir / "recall.csv");
  std::vector<std::string> rows;
  for (std::string line; std::getline(csv, line);) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == "policy,k,L,param,R_sim,R_age,R_quality,R_pop,recall,n_queries,n_skipped");
  CHECK(rows[2].rfind("smooth,10,15,0.9,0.9,10,0,", 0) == 0);

  SUBCASE("unequal capacities are refused") {
    const auto mismatch = run(with({"--out", out, "eval", "--synthetic", "--policies", "smooth:0.9,threshold:10",
                                    "--queries", "20"},
                                   corpus));
    CHECK(mismatch.code == streamlsh::cli::kValidation);
    CHECK(mismatch.err.find("differ by more than 10%") != std::string::npos);
  }
  SUBCASE("popularity radii need DynaPop") {
    CHECK(run(with({"--out", out, "eval", "--synthetic", "--policies", "smooth:0.9", "--r-pop", "0.1"}, corpus)).code ==
          streamlsh::cli::kValidation);
    const auto pop = run(with({"--out", out, "eval", "--synthetic", "--dynapop", "--policies", "smooth:0.9,threshold:auto",
                               "--r-age", "10,20", "--r-pop", "0,0.05", "--queries", "40"},
                              corpus));
    REQUIRE(pop.code == 0);
    const auto got = lines(dir / "recall.jsonl");
    REQUIRE(got.size() == 1 + 2 * 4);
    CHECK(got[1]["policy"] == "smooth");
    CHECK(got[2]["R_pop"] == 0.05);
    CHECK(got[8]["policy"] == "threshold");
  }
}

TEST_CASE("options can come from an INI config file") {
  TempDir dir("config");
  const auto out = dir.path.string();
  write(dir / "gen.ini", "seed = 3\n[generate]\nticks = 7\nitems-per-tick = 4\nclusters = 2\ndimensions = 100\n");
  REQUIRE(run({"--out", out, "--config", dir / "gen.ini", "generate"}).code == 0);
  const auto records = lines(dir / "corpus.jsonl");
  CHECK(records.size() == 1 + 28);
  CHECK(records[0]["config"]["seed"] == 3);
  write(dir / "bad.ini", "[generate]\nticks = lots\n");
  CHECK(run({"--out", out, "--config", dir / "bad.ini", "generate"}).code == streamlsh::cli::kValidation);
}
