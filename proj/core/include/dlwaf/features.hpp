// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bitset>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dlwaf::features {

/// Badword list and illegal-character set used by the Layer-1 ratios.
///
/// Badwords are stored lowercase. Illegal characters must be
/// non-alphanumeric. Instances are immutable once constructed.
class Lexicon {
 public:
  /// Throws Error(invalid_argument) when badwords is empty, a badword is
  /// empty, or an illegal character is alphanumeric.
  Lexicon(std::string version, std::vector<std::string> badwords, std::string illegal_chars);

  const std::string& version() const noexcept { return version_; }
  /// Sorted by descending length, then lexicographically.
  const std::vector<std::string>& badwords() const noexcept { return badwords_; }
  const std::string& illegal_chars() const noexcept { return illegal_chars_; }

  bool is_illegal(char c) const noexcept { return illegal_[static_cast<unsigned char>(c)]; }

  friend bool operator==(const Lexicon& a, const Lexicon& b) {
    return a.version_ == b.version_ && a.badwords_ == b.badwords_ &&
           a.illegal_chars_ == b.illegal_chars_;
  }

 private:
  std::string version_;
  std::vector<std::string> badwords_;
  std::string illegal_chars_;
  std::bitset<256> illegal_;
};

/// Lexicon compiled into the library; identical to data/lexicon.default.json.
const Lexicon& default_lexicon();

nlohmann::json to_json(const Lexicon& lexicon);
Lexicon lexicon_from_json(const nlohmann::json& j);
Lexicon load_lexicon(const std::filesystem::path& path);

inline constexpr std::array<std::string_view, 4> kFeatureNames{
    "alnum_ratio", "badword_ratio", "special_ratio", "illegal_special_ratio"};

using FeatureRow = std::array<double, 4>;

/// The four Layer-1 ratios, each a percentage.
struct L1FeatureVector {
  double alnum_ratio = 0.0;
  double badword_ratio = 0.0;
  double special_ratio = 0.0;
  double illegal_special_ratio = 0.0;

  FeatureRow as_row() const {
    return {alnum_ratio, badword_ratio, special_ratio, illegal_special_ratio};
  }
  friend bool operator==(const L1FeatureVector&, const L1FeatureVector&) = default;
};

nlohmann::json to_json(const L1FeatureVector& fv);

/// ASCII [A-Za-z0-9]; every other byte is a special character.
inline bool is_alnum(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

/// Case-insensitive, non-overlapping, leftmost-first badword hits. At a given
/// position the longest matching badword wins. A badword that starts (ends)
/// with an alphanumeric character only matches when the preceding (following)
/// character is not alphanumeric, so "or" hits "' OR 1" but not "world".
std::size_t count_badwords(std::string_view payload, const Lexicon& lexicon);

double alnum_ratio(std::string_view payload);
double badword_ratio(std::string_view payload, const Lexicon& lexicon);
double special_ratio(std::string_view payload);
double illegal_special_ratio(std::string_view payload, const Lexicon& lexicon);

L1FeatureVector extract_features(std::string_view payload, const Lexicon& lexicon);

}  // namespace dlwaf::features
