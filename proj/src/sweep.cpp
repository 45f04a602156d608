#include "streamlsh/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>

#include <fmt/core.h>

#include "streamlsh/analysis.hpp"
#include "streamlsh/error.hpp"

namespace streamlsh::analysis {

namespace {

using Params = std::map<std::string, double, std::less<>>;

struct FunctionDef {
  std::vector<std::string> params;
  std::function<double(const Params&)> eval;
};

unsigned as_count(const Params& p, const char* name) {
  const double v = p.at(name);
  if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError(fmt::format("{} must be a positive integer, got {}", name, v));
  return static_cast<unsigned>(v);
}

unsigned as_age(const Params& p, const char* name) {
  const double v = p.at(name);
  if (!(v >= 0.0) || v != std::floor(v)) throw ValidationError(fmt::format("{} must be a non-negative integer, got {}", name, v));
  return static_cast<unsigned>(v);
}

double rank_weight(const Params& p) { return 1.0 / as_count(p, "rank"); }

const std::map<std::string, FunctionDef, std::less<>>& registry() {
  static const std::map<std::string, FunctionDef, std::less<>> kFunctions = {
      {"sp_threshold",
       {{"k", "L", "t_age", "s", "a", "z"},
        [](const Params& p) {
          return sp_threshold(as_count(p, "k"), as_count(p, "L"), p.at("t_age"), p.at("s"), p.at("a"), p.at("z"));
        }}},
      {"sp_smooth",
       {{"k", "L", "p", "s", "a", "z"},
        [](const Params& p) {
          return sp_smooth(as_count(p, "k"), as_count(p, "L"), p.at("p"), p.at("s"), p.at("a"), p.at("z"));
        }}},
      {"csp_threshold",
       {{"k", "L", "t_age", "r_sim", "r_age"},
        [](const Params& p) {
          return csp(ThresholdModel{p.at("t_age")}, as_count(p, "k"), as_count(p, "L"), p.at("r_sim"),
                     as_age(p, "r_age"));
        }}},
      {"csp_smooth",
       {{"k", "L", "p", "r_sim", "r_age"},
        [](const Params& p) {
          return csp(SmoothModel{p.at("p")}, as_count(p, "k"), as_count(p, "L"), p.at("r_sim"), as_age(p, "r_age"));
        }}},
      {"csp_quality_sensitive",
       {{"k", "L", "p", "r_sim", "r_age", "r_quality"},
        [](const Params& p) {
          return csp_quality(QualityIndexing::Sensitive, as_count(p, "k"), as_count(p, "L"), p.at("p"), p.at("r_sim"),
                             as_age(p, "r_age"), p.at("r_quality"));
        }}},
      {"csp_quality_insensitive",
       {{"k", "L", "p", "r_sim", "r_age", "r_quality"},
        [](const Params& p) {
          return csp_quality(QualityIndexing::Insensitive, as_count(p, "k"), as_count(p, "L"), p.at("p"),
                             p.at("r_sim"), as_age(p, "r_age"), p.at("r_quality"));
        }}},
      {"sb", {{"p", "u", "rho", "z"}, [](const Params& p) { return sb(p.at("p"), p.at("u"), p.at("rho"), p.at("z")); }}},
      {"sb_rank",
       {{"p", "u", "rank", "z"}, [](const Params& p) { return sb(p.at("p"), p.at("u"), rank_weight(p), p.at("z")); }}},
      {"sp_dynapop",
       {{"k", "L", "p", "u", "s", "w", "z"},
        [](const Params& p) {
          return sp_dynapop(as_count(p, "k"), as_count(p, "L"), p.at("p"), p.at("u"), p.at("s"), p.at("w"), p.at("z"));
        }}},
      {"sp_dynapop_rank",
       {{"k", "L", "p", "u", "s", "rank", "z"},
        [](const Params& p) {
          return sp_dynapop(as_count(p, "k"), as_count(p, "L"), p.at("p"), p.at("u"), p.at("s"), rank_weight(p),
                            p.at("z"));
        }}},
      {"expected_index_size",
       {{"mu", "phi", "p", "L"},
        [](const Params& p) { return expected_index_size(p.at("mu"), p.at("phi"), p.at("p"), as_count(p, "L")); }}},
      {"expected_copies_threshold",
       {{"L", "t_age", "z", "a"},
        [](const Params& p) {
          return expected_copies(ThresholdModel{p.at("t_age")}, as_count(p, "L"), p.at("z"), p.at("a"));
        }}},
      {"expected_copies_smooth",
       {{"L", "p", "z", "a"},
        [](const Params& p) { return expected_copies(SmoothModel{p.at("p")}, as_count(p, "L"), p.at("z"), p.at("a")); }}},
  };
  return kFunctions;
}

const Params& defaults() {
  static const Params kDefaults = {
      {"k", 10},     {"L", 15},    {"p", 0.95},    {"t_age", 20},    {"s", 0.9},      {"a", 0},
      {"z", 1},      {"u", 1},     {"rho", 1},     {"w", 1},         {"rank", 1},     {"mu", 100},
      {"phi", 1},    {"r_sim", 0.8}, {"r_age", 20}, {"r_quality", 0.5},
  };
  return kDefaults;
}

const FunctionDef& lookup(std::string_view name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw ValidationError(fmt::format("unknown analysis function '{}'", name));
  return it->second;
}

double parse_number(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw ValidationError(fmt::format("'{}' is not a number", text));
  return v;
}

std::vector<double> range(double start, double stop, double step) {
  if (!(step > 0.0)) throw ValidationError("range step must be positive");
  if (stop < start) throw ValidationError("range stop precedes start");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    // Round to 12 significant digits so 0.1 steps print cleanly.
    const double v = start + static_cast<double>(i) * step;
    out.push_back(std::stod(fmt::format("{:.12g}", v)));
  }
  return out;
}

SweepSpec sweep(std::string function, std::vector<std::pair<std::string, std::vector<double>>> grid) {
  return SweepSpec{std::move(function), std::move(grid)};
}

}  // namespace

void SweepTable::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

std::vector<std::string> sweep_functions() {
  std::vector<std::string> names;
  for (const auto& [name, def] : registry()) names.push_back(name);
  return names;
}

std::vector<std::string> sweep_parameters(std::string_view function) { return lookup(function).params; }

std::pair<std::string, std::vector<double>> parse_grid_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ValidationError(fmt::format("grid axis '{}' is not name=values", text));
  std::string name(text.substr(0, eq));
  std::string_view values = text.substr(eq + 1);
  std::vector<std::string_view> parts;
  const char sep = values.find(':') != std::string_view::npos ? ':' : ',';
  while (true) {
    const auto pos = values.find(sep);
    parts.push_back(values.substr(0, pos));
    if (pos == std::string_view::npos) break;
    values.remove_prefix(pos + 1);
  }
  if (sep == ':') {
    if (parts.size() != 3) throw ValidationError(fmt::format("range '{}' must be start:stop:step", text));
    return {name, range(parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2]))};
  }
  std::vector<double> out;
  for (auto part : parts) out.push_back(parse_number(part));
  return {name, out};
}

SweepTable run_sweeps(const std::vector<SweepSpec>& specs) {
  SweepTable table;
  table.columns.push_back("function");
  for (const auto& spec : specs) {
    for (const auto& name : lookup(spec.function).params) {
      if (std::find(table.columns.begin(), table.columns.end(), name) == table.columns.end()) {
        table.columns.push_back(name);
      }
    }
  }
  table.columns.push_back("value");

  for (const auto& spec : specs) {
    const FunctionDef& def = lookup(spec.function);
    for (const auto& [name, values] : spec.grid) {
      if (std::find(def.params.begin(), def.params.end(), name) == def.params.end()) {
        throw ValidationError(fmt::format("function '{}' has no parameter '{}'", spec.function, name));
      }
      if (values.empty()) throw ValidationError(fmt::format("grid axis '{}' is empty", name));
    }
    Params params;
    for (const auto& name : def.params) params[name] = defaults().at(name);

    // Odometer over the grid axes, last axis fastest.
    std::vector<std::size_t> cursor(spec.grid.size(), 0);
    bool done = false;
    while (!done) {
      for (std::size_t i = 0; i < spec.grid.size(); ++i) params[spec.grid[i].first] = spec.grid[i].second[cursor[i]];
      std::vector<std::string> row(table.columns.size());
      row.front() = spec.function;
      for (std::size_t c = 1; c + 1 < table.columns.size(); ++c) {
        if (auto it = params.find(table.columns[c]); it != params.end()) row[c] = fmt::format("{}", it->second);
      }
      row.back() = fmt::format("{}", def.eval(params));
      table.rows.push_back(std::move(row));

      done = true;
      for (std::size_t axis = spec.grid.size(); axis-- > 0;) {
        if (++cursor[axis] < spec.grid[axis].second.size()) {
          done = false;
          break;
        }
        cursor[axis] = 0;
      }
    }
  }
  return table;
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4a", "fig4b", "fig6a", "fig6b", "fig7a", "fig7b", "fig8"};
}

std::vector<SweepSpec> preset(std::string_view name) {
  const auto ages = range(0, 60, 1);
  const auto radii = range(10, 100, 10);
  const auto ranks = range(1, 100, 1);
  if (name == "fig1") {
    return {sweep("sp_threshold", {{"s", {0.9}}, {"a", ages}}), sweep("sp_smooth", {{"s", {0.9}}, {"a", ages}})};
  }
  if (name == "fig2") {
    return {sweep("expected_copies_threshold", {{"z", {1.0, 0.5}}, {"a", ages}}),
            sweep("expected_copies_smooth", {{"z", {1.0, 0.5}}, {"a", ages}})};
  }
  if (name == "fig3") {
    const auto sims = range(0, 1, 0.05);
    return {sweep("sp_threshold", {{"a", ages}, {"s", sims}}), sweep("sp_smooth", {{"a", ages}, {"s", sims}})};
  }
  if (name == "fig4a" || name == "fig4b") {
    const double r_sim = name == "fig4a" ? 0.8 : 0.9;
    return {sweep("csp_threshold", {{"r_sim", {r_sim}}, {"r_age", radii}}),
            sweep("csp_smooth", {{"r_sim", {r_sim}}, {"r_age", radii}})};
  }
  if (name == "fig6a" || name == "fig6b") {
    const double r_quality = name == "fig6a" ? 0.5 : 0.9;
    return {sweep("csp_quality_sensitive", {{"p", {0.95}}, {"r_sim", {0.8}}, {"r_quality", {r_quality}}, {"r_age", radii}}),
            sweep("csp_quality_insensitive", {{"p", {0.9}}, {"r_sim", {0.8}}, {"r_quality", {r_quality}}, {"r_age", radii}})};
  }
  if (name == "fig7a") return {sweep("sb_rank", {{"p", {0.95}}, {"u", {0.25, 0.5, 1.0}}, {"rank", ranks}})};
  if (name == "fig7b") return {sweep("sb_rank", {{"u", {1.0}}, {"p", {0.9, 0.95}}, {"rank", ranks}})};
  if (name == "fig8") return {sweep("sp_dynapop_rank", {{"s", {0.7, 0.8, 0.9}}, {"rank", ranks}})};
  throw ValidationError(fmt::format("unknown preset '{}'", name));
}

}  // namespace streamlsh::analysis
