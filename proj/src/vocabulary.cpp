#include "streamlsh/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "streamlsh/error.hpp"

namespace streamlsh {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
    if (word) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency,
                       std::uint64_t document_count)
    : terms_(std::move(terms)), document_frequency_(std::move(document_frequency)), document_count_(document_count) {
  if (terms_.size() != document_frequency_.size()) {
    throw ValidationError("vocabulary terms and document frequencies differ in length");
  }
  for (std::uint32_t i = 0; i < terms_.size(); ++i) {
    if (document_frequency_[i] == 0 || document_frequency_[i] > document_count_) {
      throw ValidationError("document frequency of '" + terms_[i] + "' is outside [1, document count]");
    }
    if (!index_.emplace(terms_[i], i).second) throw ValidationError("duplicate vocabulary term '" + terms_[i] + "'");
  }
}

void Vocabulary::add_document(std::span<const std::string> tokens) {
  ++document_count_;
  std::vector<std::uint32_t> seen;
  seen.reserve(tokens.size());
  for (const auto& token : tokens) {
    auto [it, inserted] = index_.emplace(token, static_cast<std::uint32_t>(terms_.size()));
    if (inserted) {
      terms_.push_back(token);
      document_frequency_.push_back(0);
    }
    seen.push_back(it->second);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (auto index : seen) ++document_frequency_[index];
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> documents) {
  Vocabulary vocab;
  for (const auto& doc : documents) vocab.add_document(doc);
  return vocab;
}

std::optional<std::uint32_t> Vocabulary::index_of(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::uint32_t index) const {
  return std::log(static_cast<double>(document_count_) / (static_cast<double>(document_frequency(index)) + 1.0)) + 1.0;
}

SparseVector Vocabulary::vectorize(std::span<const std::string> tokens) const {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& token : tokens) {
    if (auto index = index_of(token)) ++counts[*index];
  }
  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.size());
  for (auto [index, tf] : counts) entries.push_back({index, std::sqrt(static_cast<double>(tf)) * idf(index)});
  SparseVector v = SparseVector::from_entries(std::move(entries));
  if (v.empty()) throw DomainError("document has no in-vocabulary terms (zero vector)");
  return v;
}

}  // namespace streamlsh
