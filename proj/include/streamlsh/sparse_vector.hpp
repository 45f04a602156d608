#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace streamlsh {

/// An immutable sparse vector over non-negative reals. Entries are kept
/// sorted by dimension with no duplicates and no zero weights; the
/// Euclidean norm is cached. Copies share storage.
class SparseVector {
 public:
  struct Entry {
    std::uint32_t index;
    double weight;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseVector() = default;

  /// Builds a vector from entries in any order. Zero weights are dropped.
  /// Throws DomainError on negative or non-finite weights and on repeated
  /// dimension indices.
  static SparseVector from_entries(std::vector<Entry> entries);

  std::span<const Entry> entries() const noexcept;
  std::size_t nnz() const noexcept { return entries_ ? entries_->size() : 0; }
  bool empty() const noexcept { return nnz() == 0; }
  double norm() const noexcept { return norm_; }
  /// One past the largest dimension index, 0 for the zero vector.
  std::uint32_t extent() const noexcept;

  /// Multiplies every weight by `factor` (> 0).
  SparseVector scaled(double factor) const;

  friend bool operator==(const SparseVector& a, const SparseVector& b);

 private:
  std::shared_ptr<const std::vector<Entry>> entries_;
  double norm_ = 0.0;
};

double dot(const SparseVector& u, const SparseVector& v) noexcept;

/// (u.v) / (|u||v|) clamped to [-1, 1]. Throws DomainError if either norm is zero.
double cosine(const SparseVector& u, const SparseVector& v);

/// 1 - theta(u, v) / pi, where theta is the angle between u and v.
/// Throws DomainError if either norm is zero.
double angular_similarity(const SparseVector& u, const SparseVector& v);

/// Angular similarity corresponding to a cosine value.
double angular_from_cosine(double cosine_value) noexcept;

}  // namespace streamlsh
