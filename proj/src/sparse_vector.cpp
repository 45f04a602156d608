#include "streamlsh/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

#include "streamlsh/error.hpp"

namespace streamlsh {

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::vector<Entry> kept;
  kept.reserve(entries.size());
  double squared = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw DomainError(fmt::format("weight {} at dimension {} is not a finite non-negative value", e.weight, e.index));
    }
    if (i > 0 && entries[i - 1].index == e.index) {
      throw DomainError(fmt::format("dimension {} appears more than once", e.index));
    }
    if (e.weight == 0.0) continue;
    kept.push_back(e);
    squared += e.weight * e.weight;
  }
  SparseVector v;
  if (!kept.empty()) {
    v.entries_ = std::make_shared<const std::vector<Entry>>(std::move(kept));
    v.norm_ = std::sqrt(squared);
  }
  return v;
}

std::span<const SparseVector::Entry> SparseVector::entries() const noexcept {
  if (!entries_) return {};
  return {entries_->data(), entries_->size()};
}

std::uint32_t SparseVector::extent() const noexcept {
  return empty() ? 0 : entries_->back().index + 1;
}

SparseVector SparseVector::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw DomainError(fmt::format("scale factor must be positive and finite, got {}", factor));
  }
  std::vector<Entry> out(entries().begin(), entries().end());
  for (auto& e : out) e.weight *= factor;
  return from_entries(std::move(out));
}

bool operator==(const SparseVector& a, const SparseVector& b) {
  const auto ea = a.entries();
  const auto eb = b.entries();
  return std::equal(ea.begin(), ea.end(), eb.begin(), eb.end());
}

double dot(const SparseVector& u, const SparseVector& v) noexcept {
  auto a = u.entries();
  auto b = v.entries();
  std::size_t i = 0, j = 0;
  double sum = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < a[i].index) {
      ++j;
    } else {
      sum += a[i].weight * b[j].weight;
      ++i;
      ++j;
    }
  }
  return sum;
}

double cosine(const SparseVector& u, const SparseVector& v) {
  if (u.norm() == 0.0 || v.norm() == 0.0) throw DomainError("cosine of a zero-norm vector is undefined");
  const double c = dot(u, v) / (u.norm() * v.norm());
  // Rounding in the norms can leave v.v / |v|^2 a few ulps away from 1.
  constexpr double kSnap = 8 * std::numeric_limits<double>::epsilon();
  if (c > 1.0 - kSnap) return 1.0;
  if (c < -1.0 + kSnap) return -1.0;
  return c;
}

double angular_from_cosine(double cosine_value) noexcept {
  return 1.0 - std::acos(std::clamp(cosine_value, -1.0, 1.0)) / std::numbers::pi;
}

double angular_similarity(const SparseVector& u, const SparseVector& v) {
  if (u.norm() == 0.0 || v.norm() == 0.0) {
    throw DomainError("angular similarity of a zero-norm vector is undefined");
  }
  return angular_from_cosine(cosine(u, v));
}

}  // namespace streamlsh
