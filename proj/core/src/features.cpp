// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/features.hpp"

#include <algorithm>
#include <fstream>

#include "dlwaf/error.hpp"

namespace dlwaf::features {
namespace {

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::size_t count_alnum(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), is_alnum));
}

bool matches_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (lower(text[pos + k]) != word[k]) return false;
  }
  if (is_alnum(word.front()) && pos > 0 && is_alnum(text[pos - 1])) return false;
  std::size_t end = pos + word.size();
  if (is_alnum(word.back()) && end < text.size() && is_alnum(text[end])) return false;
  return true;
}

}  // namespace

Lexicon::Lexicon(std::string version, std::vector<std::string> badwords, std::string illegal_chars)
    : version_(std::move(version)), badwords_(std::move(badwords)) {
  if (badwords_.empty()) throw Error(ErrorCode::invalid_argument, "lexicon has no badwords");
  for (auto& w : badwords_) {
    if (w.empty()) throw Error(ErrorCode::invalid_argument, "empty badword");
    std::transform(w.begin(), w.end(), w.begin(), lower);
  }
  std::sort(badwords_.begin(), badwords_.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  badwords_.erase(std::unique(badwords_.begin(), badwords_.end()), badwords_.end());

  for (char c : illegal_chars) {
    if (is_alnum(c)) {
      throw Error(ErrorCode::invalid_argument,
                  std::string("illegal character set contains alphanumeric '") + c + "'");
    }
    if (!illegal_[static_cast<unsigned char>(c)]) {
      illegal_[static_cast<unsigned char>(c)] = true;
      illegal_chars_ += c;
    }
  }
}

const Lexicon& default_lexicon() {
  static const Lexicon lexicon(
      "2026.1",
      {"select", "union", "insert", "update", "delete", "drop", "sleep", "benchmark",
       "or", "and", "from", "where", "null", "order", "by", "values", "table", "into",
       "count", "version", "convert", "all", "set",
       "script", "alert", "onerror", "onload", "onmouseover", "eval", "javascript", "document",
       "cookie", "iframe", "svg", "img", "src", "href", "prompt", "fromcharcode",
       "cat", "etc", "passwd", "shadow", "hosts", "bash", "sh", "wget", "curl", "cmd", "exec",
       "whoami", "uname", "ping", "nc", "rm", "ls", "echo", "dir", "tmp", "bin", "dev",
       "proc", "environ", "boot", "ini", "win",
       ".."},
      "'\"<>;|`\\#%(){}");
  return lexicon;
}

nlohmann::json to_json(const Lexicon& lexicon) {
  return {{"version", lexicon.version()},
          {"badwords", lexicon.badwords()},
          {"illegal_chars", lexicon.illegal_chars()}};
}

Lexicon lexicon_from_json(const nlohmann::json& j) {
  try {
    return Lexicon(j.at("version").get<std::string>(),
                   j.at("badwords").get<std::vector<std::string>>(),
                   j.at("illegal_chars").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema_violation, std::string("lexicon: ") + e.what());
  }
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open lexicon " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::schema_violation, "lexicon is not JSON: " + path.string());
  return lexicon_from_json(j);
}

nlohmann::json to_json(const L1FeatureVector& fv) {
  return {{"alnum_ratio", fv.alnum_ratio},
          {"badword_ratio", fv.badword_ratio},
          {"special_ratio", fv.special_ratio},
          {"illegal_special_ratio", fv.illegal_special_ratio}};
}

std::size_t count_badwords(std::string_view payload, const Lexicon& lexicon) {
  std::size_t hits = 0;
  std::size_t pos = 0;
  while (pos < payload.size()) {
    std::size_t advance = 1;
    for (const auto& word : lexicon.badwords()) {
      if (matches_at(payload, pos, word)) {
        ++hits;
        advance = word.size();
        break;
      }
    }
    pos += advance;
  }
  return hits;
}

double alnum_ratio(std::string_view payload) {
  if (payload.empty()) return 0.0;
  return 100.0 * static_cast<double>(count_alnum(payload)) / static_cast<double>(payload.size());
}

double badword_ratio(std::string_view payload, const Lexicon& lexicon) {
  std::size_t alnum = count_alnum(payload);
  if (alnum == 0) return 0.0;
  return 100.0 * static_cast<double>(count_badwords(payload, lexicon)) / static_cast<double>(alnum);
}

double special_ratio(std::string_view payload) {
  if (payload.empty()) return 0.0;
  std::size_t special = payload.size() - count_alnum(payload);
  return 100.0 * static_cast<double>(special) / static_cast<double>(payload.size());
}

double illegal_special_ratio(std::string_view payload, const Lexicon& lexicon) {
  std::size_t special = 0;
  std::size_t illegal = 0;
  for (char c : payload) {
    if (is_alnum(c)) continue;
    ++special;
    if (lexicon.is_illegal(c)) ++illegal;
  }
  if (special == 0) return 0.0;
  return 100.0 * static_cast<double>(illegal) / static_cast<double>(special);
}

L1FeatureVector extract_features(std::string_view payload, const Lexicon& lexicon) {
  return {alnum_ratio(payload), badword_ratio(payload, lexicon), special_ratio(payload),
          illegal_special_ratio(payload, lexicon)};
}

}  // namespace dlwaf::features
