// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlwaf/sparse_vector.hpp"

namespace dlwaf::tfidf {

struct NgramConfig {
  int min_n = 1;
  int max_n = 4;
  bool lowercase = true;
  /// Keep the tokens with the highest document frequency, ties by token order.
  std::optional<std::size_t> max_features = 50000;

  void validate() const;
  friend bool operator==(const NgramConfig&, const NgramConfig&) = default;
};

/// Every contiguous character n-gram for n in [min_n, max_n], shorter n first,
/// left to right within each n.
std::vector<std::string> tokenize(std::string_view text, const NgramConfig& config);

/// Fitted character n-gram vocabulary with smoothed idf:
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1.
class TfidfVocabulary {
 public:
  TfidfVocabulary() = default;
  /// tokens must be sorted and unique; idf parallel to tokens.
  TfidfVocabulary(std::vector<std::string> tokens, std::vector<double> idf, std::size_t n_documents,
                  NgramConfig config);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::optional<std::uint32_t> index_of(std::string_view token) const;

  /// Raw counts times idf, L2-normalized. Out-of-vocabulary grams are ignored;
  /// text with no known gram maps to the empty vector.
  SparseVector transform(std::string_view text) const;

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t n_documents() const noexcept { return n_documents_; }
  const NgramConfig& config() const noexcept { return config_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> tokens_;
  std::vector<double> idf_;
  std::size_t n_documents_ = 0;
  NgramConfig config_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
};

/// Throws Error(empty_corpus) for an empty corpus.
TfidfVocabulary fit_vocabulary(std::span<const std::string> corpus, const NgramConfig& config);

nlohmann::json to_json(const TfidfVocabulary& vocab);
/// Throws Error(corrupt_bundle) when tokens are unsorted or idf values are invalid.
TfidfVocabulary vocabulary_from_json(const nlohmann::json& j);

}  // namespace dlwaf::tfidf
