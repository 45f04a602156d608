#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "streamlsh/sparse_vector.hpp"

namespace streamlsh {

/// Lower-cases ASCII letters and splits on anything that is not an ASCII
/// letter or digit. Bytes >= 0x80 are kept so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

/// Term dictionary with document frequencies, built over a training corpus.
/// Dimension indices are dense and assigned in first-seen order.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Restores a vocabulary from its parts (snapshot loading).
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency,
             std::uint64_t document_count);

  /// Counts each distinct token of `tokens` once.
  void add_document(std::span<const std::string> tokens);

  static Vocabulary build(std::span<const std::vector<std::string>> documents);

  std::optional<std::uint32_t> index_of(const std::string& term) const;
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }
  std::uint32_t document_frequency(std::uint32_t index) const { return document_frequency_.at(index); }
  std::uint64_t document_count() const noexcept { return document_count_; }
  std::size_t size() const noexcept { return terms_.size(); }

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint32_t>& document_frequencies() const noexcept { return document_frequency_; }

  /// ln(N / (df + 1)) + 1.
  double idf(std::uint32_t index) const;

  /// TF-IDF weighting: sqrt(tf) * idf. Out-of-vocabulary tokens are
  /// dropped; throws DomainError if nothing is left.
  SparseVector vectorize(std::span<const std::string> tokens) const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> document_frequency_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t document_count_ = 0;
};

}  // namespace streamlsh
