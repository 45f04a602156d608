#pragma once

#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace streamlsh::analysis {

/// A named analytical function evaluated over the cartesian product of
/// parameter values. Parameters not in `grid` take their defaults.
struct SweepSpec {
  std::string function;
  std::vector<std::pair<std::string, std::vector<double>>> grid;
};

/// Rows of formatted cells under a shared header.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
};

/// Names accepted by SweepSpec::function.
std::vector<std::string> sweep_functions();
/// Parameter names of a function, in column order.
std::vector<std::string> sweep_parameters(std::string_view function);

/// Parses "name=v1,v2,..." or "name=start:stop:step" (inclusive).
std::pair<std::string, std::vector<double>> parse_grid_axis(std::string_view text);

/// Evaluates all specs; columns are "function", the union of parameters in
/// first-seen order, then "value". Throws ValidationError for unknown
/// functions, parameters or out-of-range values.
SweepTable run_sweeps(const std::vector<SweepSpec>& specs);

std::vector<std::string> preset_names();
/// Named preset sweeps ("fig1" ... "fig8").
std::vector<SweepSpec> preset(std::string_view name);

}  // namespace streamlsh::analysis
