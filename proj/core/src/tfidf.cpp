// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dlwaf/error.hpp"
#include "internal/escape.hpp"

namespace dlwaf::tfidf {
namespace {

std::string prepare(std::string_view text, bool lowercase) {
  std::string out(text);
  if (lowercase) {
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  }
  return out;
}

template <typename Fn>
void for_each_gram(std::string_view text, const NgramConfig& config, Fn&& fn) {
  for (int n = config.min_n; n <= config.max_n; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (len > text.size()) break;
    for (std::size_t i = 0; i + len <= text.size(); ++i) fn(text.substr(i, len));
  }
}

}  // namespace

void NgramConfig::validate() const {
  if (min_n < 1) throw Error(ErrorCode::invalid_argument, "ngram min_n must be >= 1");
  if (max_n < min_n) throw Error(ErrorCode::invalid_argument, "ngram max_n must be >= min_n");
  if (max_features && *max_features == 0) throw Error(ErrorCode::invalid_argument, "max_features must be > 0");
}

std::vector<std::string> tokenize(std::string_view text, const NgramConfig& config) {
  config.validate();
  std::string prepared = prepare(text, config.lowercase);
  std::vector<std::string> tokens;
  for_each_gram(prepared, config, [&](std::string_view g) { tokens.emplace_back(g); });
  return tokens;
}

TfidfVocabulary::TfidfVocabulary(std::vector<std::string> tokens, std::vector<double> idf,
                                 std::size_t n_documents, NgramConfig config)
    : tokens_(std::move(tokens)), idf_(std::move(idf)), n_documents_(n_documents), config_(config) {
  index_.reserve(tokens_.size());
  for (std::size_t k = 0; k < tokens_.size(); ++k) index_.emplace(tokens_[k], static_cast<std::uint32_t>(k));
}

std::optional<std::uint32_t> TfidfVocabulary::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfVocabulary::transform(std::string_view text) const {
  std::string prepared = prepare(text, config_.lowercase);
  std::unordered_map<std::uint32_t, double> counts;
  for_each_gram(prepared, config_, [&](std::string_view g) {
    auto it = index_.find(g);
    if (it != index_.end()) counts[it->second] += 1.0;
  });
  SparseVector v;
  v.entries.reserve(counts.size());
  double norm = 0.0;
  for (const auto& [idx, count] : counts) {
    const double w = count * idf_[idx];
    v.entries.push_back({idx, w});
    norm += w * w;
  }
  std::sort(v.entries.begin(), v.entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& e : v.entries) e.weight /= norm;
  }
  return v;
}

TfidfVocabulary fit_vocabulary(std::span<const std::string> corpus, const NgramConfig& config) {
  config.validate();
  if (corpus.empty()) throw Error(ErrorCode::empty_corpus, "cannot fit a vocabulary on zero documents");

  std::unordered_map<std::string, std::size_t> df;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : corpus) {
    std::string prepared = prepare(doc, config.lowercase);
    seen.clear();
    for_each_gram(prepared, config, [&](std::string_view g) {
      if (seen.insert(g).second) ++df[std::string(g)];
    });
  }

  std::vector<std::pair<std::string, std::size_t>> terms(df.begin(), df.end());
  if (config.max_features && terms.size() > *config.max_features) {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    terms.resize(*config.max_features);
  }
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n = static_cast<double>(corpus.size());
  std::vector<std::string> tokens;
  std::vector<double> idf;
  tokens.reserve(terms.size());
  idf.reserve(terms.size());
  for (auto& [token, count] : terms) {
    tokens.push_back(std::move(token));
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return TfidfVocabulary(std::move(tokens), std::move(idf), corpus.size(), config);
}

namespace {

nlohmann::json escaped_tokens(const std::vector<std::string>& tokens) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tokens) out.push_back(internal::escape_bytes(t));
  return out;
}

}  // namespace

nlohmann::json to_json(const TfidfVocabulary& vocab) {
  const NgramConfig& c = vocab.config();
  return {{"config",
           {{"min_n", c.min_n},
            {"max_n", c.max_n},
            {"lowercase", c.lowercase},
            {"max_features", c.max_features ? nlohmann::json(*c.max_features) : nlohmann::json(nullptr)}}},
          {"n_documents", vocab.n_documents()},
          {"tokens", escaped_tokens(vocab.tokens())},
          {"idf", vocab.idf()}};
}

TfidfVocabulary vocabulary_from_json(const nlohmann::json& j) {
  auto corrupt = [](const std::string& why) { return Error(ErrorCode::corrupt_bundle, "vocabulary: " + why); };
  try {
    NgramConfig c;
    const auto& jc = j.at("config");
    c.min_n = jc.at("min_n").get<int>();
    c.max_n = jc.at("max_n").get<int>();
    c.lowercase = jc.at("lowercase").get<bool>();
    c.max_features = jc.at("max_features").is_null()
                         ? std::nullopt
                         : std::optional<std::size_t>(jc.at("max_features").get<std::size_t>());
    try {
      c.validate();
    } catch (const Error& e) {
      throw corrupt(e.detail());
    }
    auto escaped = j.at("tokens").get<std::vector<std::string>>();
    std::vector<std::string> tokens(escaped.size());
    for (std::size_t k = 0; k < escaped.size(); ++k) {
      if (!internal::unescape_bytes(escaped[k], tokens[k])) throw corrupt("bad token escape");
    }
    auto idf = j.at("idf").get<std::vector<double>>();
    if (tokens.size() != idf.size()) throw corrupt("tokens and idf differ in length");
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      if (!(tokens[k - 1] < tokens[k])) throw corrupt("tokens not sorted and unique");
    }
    for (double v : idf) {
      if (!std::isfinite(v) || v < 1.0) throw corrupt("idf value below 1");
    }
    return TfidfVocabulary(std::move(tokens), std::move(idf), j.at("n_documents").get<std::size_t>(), c);
  } catch (const nlohmann::json::exception& e) {
    throw corrupt(e.what());
  }
}

}  // namespace dlwaf::tfidf
