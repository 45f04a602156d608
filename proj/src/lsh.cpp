#include "streamlsh/lsh.hpp"

#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "streamlsh/error.hpp"
#include "streamlsh/random.hpp"

namespace streamlsh {

float hyperplane_coordinate(std::uint64_t seed, std::uint32_t dimension) noexcept {
  // Box-Muller over two counter-derived uniforms; u1 in (0, 1].
  const std::uint64_t key = mix64(seed ^ mix64(0xd1b54a32d192ed03ULL + dimension));
  const double u1 = 1.0 - to_unit(key);
  const double u2 = to_unit(mix64(key ^ 0x8cb92ba72f3d8dd7ULL));
  return static_cast<float>(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2));
}

double HyperplaneHash::project(const SparseVector& v) const noexcept {
  double sum = 0.0;
  for (const auto& e : v.entries()) sum += static_cast<double>(hyperplane_coordinate(seed_, e.index)) * e.weight;
  return sum;
}

bool HyperplaneHash::operator()(const SparseVector& v) const {
  if (v.norm() == 0.0) throw DomainError("cannot hash a zero-norm vector");
  return project(v) >= 0.0;
}

SketchFunction::SketchFunction(std::vector<HyperplaneHash> hashes) : hashes_(std::move(hashes)) {
  if (hashes_.empty() || hashes_.size() > kMaxSketchBits) {
    throw ValidationError(fmt::format("sketch width must be in [1, {}], got {}", kMaxSketchBits, hashes_.size()));
  }
}

Sketch SketchFunction::operator()(const SparseVector& v) const {
  if (v.norm() == 0.0) throw DomainError("cannot sketch a zero-norm vector");
  Sketch out = 0;
  for (std::size_t i = 0; i < hashes_.size(); ++i) {
    if (hashes_[i].project(v) >= 0.0) out |= Sketch{1} << i;
  }
  return out;
}

LshFamily::LshFamily(unsigned k, unsigned tables, std::uint64_t seed) : k_(k), seed_(seed) {
  if (k == 0 || k > kMaxSketchBits) throw ValidationError(fmt::format("k must be in [1, {}], got {}", kMaxSketchBits, k));
  if (tables == 0) throw ValidationError("L must be positive");
  functions_.reserve(tables);
  for (unsigned t = 0; t < tables; ++t) {
    std::vector<HyperplaneHash> hashes;
    hashes.reserve(k);
    for (unsigned b = 0; b < k; ++b) hashes.emplace_back(derive_seed(seed, {t, b}));
    functions_.emplace_back(std::move(hashes));
  }
}

void LshFamily::materialize(std::uint32_t dimensions) {
  if (dimensions <= cached_dims_) return;
  const std::size_t width = static_cast<std::size_t>(k_) * functions_.size();
  coordinates_.resize(static_cast<std::size_t>(dimensions) * width);
  for (std::uint32_t d = cached_dims_; d < dimensions; ++d) {
    float* row = coordinates_.data() + static_cast<std::size_t>(d) * width;
    for (std::size_t t = 0; t < functions_.size(); ++t) {
      const auto& hashes = functions_[t].hashes();
      for (unsigned b = 0; b < k_; ++b) row[t * k_ + b] = hyperplane_coordinate(hashes[b].seed(), d);
    }
  }
  cached_dims_ = dimensions;
}

Sketch LshFamily::sketch(std::size_t table, const SparseVector& v) const {
  if (table >= functions_.size()) throw ValidationError(fmt::format("table index {} out of range", table));
  if (v.norm() == 0.0) throw DomainError("cannot sketch a zero-norm vector");
  const auto& hashes = functions_[table].hashes();
  const std::size_t width = static_cast<std::size_t>(k_) * functions_.size();
  double projections[kMaxSketchBits] = {};
  for (const auto& e : v.entries()) {
    if (e.index < cached_dims_) {
      const float* row = coordinates_.data() + static_cast<std::size_t>(e.index) * width + table * k_;
      for (unsigned b = 0; b < k_; ++b) projections[b] += static_cast<double>(row[b]) * e.weight;
    } else {
      for (unsigned b = 0; b < k_; ++b) {
        projections[b] += static_cast<double>(hyperplane_coordinate(hashes[b].seed(), e.index)) * e.weight;
      }
    }
  }
  Sketch out = 0;
  for (unsigned b = 0; b < k_; ++b) {
    if (projections[b] >= 0.0) out |= Sketch{1} << b;
  }
  return out;
}

std::vector<Sketch> LshFamily::sketches(const SparseVector& v) const {
  std::vector<Sketch> out(functions_.size());
  for (std::size_t t = 0; t < functions_.size(); ++t) out[t] = sketch(t, v);
  return out;
}

}  // namespace streamlsh
