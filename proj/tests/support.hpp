#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "streamlsh/sparse_vector.hpp"
#include "streamlsh/stream_index.hpp"

namespace testing {

using streamlsh::SparseVector;

inline SparseVector vec(std::initializer_list<std::pair<std::uint32_t, double>> entries) {
  std::vector<SparseVector::Entry> e;
  for (auto [i, w] : entries) e.push_back({i, w});
  return SparseVector::from_entries(std::move(e));
}

/// Two non-negative vectors at angular similarity `s` (s >= 0.5):
/// e3 and cos(theta) e3 + sin(theta) e7 with theta = pi (1 - s).
inline std::pair<SparseVector, SparseVector> pair_at(double s) {
  const double theta = std::numbers::pi * (1.0 - s);
  return {vec({{3, 1.0}}), vec({{3, std::cos(theta)}, {7, std::sin(theta)}})};
}

inline streamlsh::Item item(std::string id, streamlsh::Tick tick, SparseVector v, double quality = 1.0) {
  return streamlsh::Item{std::move(id), tick, std::move(v), quality};
}

}  // namespace testing
