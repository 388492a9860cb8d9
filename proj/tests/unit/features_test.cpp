// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "dlwaf/error.hpp"
#include "dlwaf/features.hpp"
#include "test_support.hpp"

namespace dlwaf::features {
namespace {

Lexicon sql_lexicon() { return Lexicon("t", {"or", "union", "select"}, "'<>"); }

TEST(AlnumRatio, Examples) {
  EXPECT_DOUBLE_EQ(alnum_ratio("abc123"), 100.0);
  EXPECT_DOUBLE_EQ(alnum_ratio(""), 0.0);
  EXPECT_NEAR(alnum_ratio("a=1&b=2"), 100.0 * 4 / 7, 1e-12);
}

TEST(BadwordRatio, Examples) {
  EXPECT_DOUBLE_EQ(badword_ratio("hello world", default_lexicon()), 0.0);
  EXPECT_NEAR(badword_ratio("union select", sql_lexicon()), 100.0 * 2 / 11, 1e-12);
  EXPECT_DOUBLE_EQ(badword_ratio("", default_lexicon()), 0.0);
  EXPECT_DOUBLE_EQ(badword_ratio("'''", sql_lexicon()), 0.0);
}

TEST(BadwordRatio, MatchingRules) {
  const Lexicon lex = sql_lexicon();
  EXPECT_EQ(count_badwords("' OR 1=1", lex), 1u);
  EXPECT_EQ(count_badwords("UnIoN SeLeCt", lex), 2u);
  EXPECT_EQ(count_badwords("world order", lex), 0u);  // alnum neighbours block a hit
  EXPECT_EQ(count_badwords("1%20or%201", lex), 0u);   // "20or20" is one alnum run
  EXPECT_EQ(count_badwords("x=or&y=or", lex), 2u);
  Lexicon dots("t", {".."}, "'");
  EXPECT_EQ(count_badwords("...", dots), 1u);  // non-overlapping
  EXPECT_EQ(count_badwords("....//..", dots), 3u);
  EXPECT_EQ(count_badwords("a..b", dots), 1u);  // non-alnum edges match anywhere
}

TEST(BadwordRatio, LongestMatchWins) {
  Lexicon lex("t", {"sh", "bash"}, "'");
  EXPECT_EQ(count_badwords("bash", lex), 1u);
  EXPECT_EQ(count_badwords("sh;bash", lex), 2u);
}

TEST(SpecialRatio, Examples) {
  EXPECT_DOUBLE_EQ(special_ratio("abcd"), 0.0);
  EXPECT_DOUBLE_EQ(special_ratio("' OR 1=1"), 50.0);
  EXPECT_DOUBLE_EQ(special_ratio("<>"), 100.0);
}

TEST(IllegalSpecialRatio, Examples) {
  EXPECT_DOUBLE_EQ(illegal_special_ratio("a b", default_lexicon()), 0.0);
  EXPECT_DOUBLE_EQ(illegal_special_ratio("' OR 1=1", sql_lexicon()), 25.0);
  EXPECT_DOUBLE_EQ(illegal_special_ratio("<script>", sql_lexicon()), 100.0);
  EXPECT_DOUBLE_EQ(illegal_special_ratio("abc", sql_lexicon()), 0.0);
}

TEST(ExtractFeatures, Examples) {
  EXPECT_EQ(extract_features("abc123", default_lexicon()), (L1FeatureVector{100, 0, 0, 0}));
  EXPECT_EQ(extract_features("", default_lexicon()), (L1FeatureVector{0, 0, 0, 0}));
  Lexicon lex("t", {"or"}, "'");
  EXPECT_EQ(extract_features("' OR 1=1", lex), (L1FeatureVector{50, 25, 50, 25}));
}

TEST(ExtractFeatures, ColumnOrder) {
  auto fv = extract_features("' OR 1=1", default_lexicon());
  auto row = fv.as_row();
  EXPECT_EQ(row[0], fv.alnum_ratio);
  EXPECT_EQ(row[1], fv.badword_ratio);
  EXPECT_EQ(row[2], fv.special_ratio);
  EXPECT_EQ(row[3], fv.illegal_special_ratio);
  EXPECT_EQ(kFeatureNames[3], "illegal_special_ratio");
}

TEST(DefaultLexicon, SpecifiedIllegalSet) {
  const auto& lex = default_lexicon();
  for (char c : std::string("'\"<>;|`\\#%(){}")) EXPECT_TRUE(lex.is_illegal(c)) << c;
  for (char c : std::string(" =&?/:.-_")) EXPECT_FALSE(lex.is_illegal(c)) << c;
  for (const char* w : {"select", "union", "insert", "update", "delete", "drop", "sleep", "benchmark", "or",
                        "and", "from", "where", "script", "alert", "onerror", "onload", "eval", "javascript",
                        "document", "cookie", "cat", "etc", "passwd", "bash", "wget", "curl", "cmd", "exec",
                        ".."}) {
    EXPECT_NE(std::find(lex.badwords().begin(), lex.badwords().end(), w), lex.badwords().end()) << w;
  }
}

TEST(DefaultLexicon, MatchesShippedFile) {
  EXPECT_EQ(load_lexicon(DLWAF_LEXICON_FILE), default_lexicon());
}

TEST(Lexicon, Validation) {
  EXPECT_THROW(Lexicon("v", {}, "'"), Error);
  EXPECT_THROW(Lexicon("v", {""}, "'"), Error);
  EXPECT_THROW(Lexicon("v", {"x"}, "'a"), Error);
  Lexicon lex("v", {"SELECT", "or"}, "'");
  EXPECT_EQ(lex.badwords().front(), "select");
}

TEST(Lexicon, JsonRoundTrip) {
  const auto& lex = default_lexicon();
  EXPECT_EQ(lexicon_from_json(to_json(lex)), lex);
}

// Properties ---------------------------------------------------------------------

TEST(FeatureProperties, ComplementBoundsAndFiniteness) {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const std::string p = testing::random_payload(rng, 80);
    const auto fv = extract_features(p, default_lexicon());
    for (double v : fv.as_row()) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
    }
    EXPECT_LE(fv.alnum_ratio, 100.0);
    EXPECT_LE(fv.special_ratio, 100.0);
    EXPECT_LE(fv.illegal_special_ratio, 100.0);
    if (!p.empty()) EXPECT_NEAR(fv.alnum_ratio + fv.special_ratio, 100.0, 1e-9);
  }
}

TEST(FeatureProperties, AppendingAlnumNeverRaisesSpecialRatio) {
  Rng rng(4);
  for (int i = 0; i < 3000; ++i) {
    const std::string p = testing::random_payload(rng, 50);
    EXPECT_LE(special_ratio(p + "k"), special_ratio(p) + 1e-12);
  }
}

TEST(FeatureProperties, DisjointLexiconGivesZeroBadwords) {
  Lexicon lex("v", {"qqqqqqqqqqqq"}, "'");
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) EXPECT_EQ(badword_ratio(testing::random_payload(rng, 60), lex), 0.0);
}

TEST(FeatureProperties, MatchesOracle) {
  const auto& lex = default_lexicon();
  Rng rng(9);
  for (int i = 0; i < 3000; ++i) {
    const std::string p = testing::random_payload(rng, 100);
    const auto fv = extract_features(p, lex);
    const auto o = testing::oracle_features(p, lex.badwords(), lex.illegal_chars());
    EXPECT_NEAR(fv.alnum_ratio, o.alnum, 1e-9);
    EXPECT_NEAR(fv.badword_ratio, o.badword, 1e-9) << p;
    EXPECT_NEAR(fv.special_ratio, o.special, 1e-9);
    EXPECT_NEAR(fv.illegal_special_ratio, o.illegal, 1e-9);
  }
}

}  // namespace
}  // namespace dlwaf::features
