// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dlwaf/error.hpp"
#include "dlwaf/eval.hpp"
#include "dlwaf/random.hpp"

namespace dlwaf::eval {
namespace {

ConfusionCounts cc(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) { return {tp, fp, tn, fn}; }

TEST(Metrics, HeadlineCounts) {
  const auto c = cc(22625, 0, 7835, 51);
  EXPECT_NEAR(accuracy(c), 0.99833, 1e-5);
  EXPECT_DOUBLE_EQ(accuracy(c), 30460.0 / 30511.0);
  EXPECT_EQ(precision(c), 1.0);
  EXPECT_NEAR(recall(c), 22625.0 / 22676.0, 1e-9);
  EXPECT_NEAR(recall(c), 0.997751, 1e-6);
}

TEST(Metrics, SmallCases) {
  EXPECT_EQ(precision(cc(0, 5, 0, 0)), 0.0);
  EXPECT_EQ(precision(cc(3, 1, 0, 0)), 0.75);
  EXPECT_EQ(recall(cc(0, 0, 0, 1)), 0.0);
  EXPECT_EQ(recall(cc(1, 0, 0, 1)), 0.5);
  EXPECT_EQ(accuracy(cc(5, 0, 5, 0)), 1.0);
  EXPECT_EQ(accuracy(cc(1, 1, 1, 1)), 0.5);
}

TEST(Metrics, VacuousRules) {
  const auto c = cc(0, 0, 4, 0);
  EXPECT_EQ(precision(c), 1.0);
  EXPECT_EQ(recall(c), 1.0);
  EXPECT_TRUE(precision_vacuous(c));
  EXPECT_TRUE(recall_vacuous(c));
  auto r = make_report(c);
  EXPECT_TRUE(r.precision_vacuous);
  EXPECT_TRUE(r.recall_vacuous);
  try {
    accuracy(ConfusionCounts{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_confusion);
  }
}

TEST(Confusion, Examples) {
  const std::vector<int> p1{1, 0}, l1{1, 0};
  EXPECT_EQ(confusion(p1, l1), cc(1, 0, 1, 0));
  const std::vector<int> p2{1}, l2{0};
  EXPECT_EQ(confusion(p2, l2), cc(0, 1, 0, 0));
  const std::vector<int> p3{1, 0};
  try {
    confusion(p3, l2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::length_mismatch);
  }
}

TEST(Confusion, MatchesBruteTally) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> p(1 + rng.below(50)), l(p.size());
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = static_cast<int>(rng.below(2));
      l[i] = static_cast<int>(rng.below(2));
      if (p[i] && l[i]) ++tp;
      if (p[i] && !l[i]) ++fp;
      if (!p[i] && !l[i]) ++tn;
      if (!p[i] && l[i]) ++fn;
    }
    const auto c = confusion(p, l);
    EXPECT_EQ(c, cc(tp, fp, tn, fn));
    const auto r = make_report(c);
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
    EXPECT_NEAR(r.accuracy, static_cast<double>(tp + tn) / static_cast<double>(p.size()), 1e-12);
    EXPECT_NEAR(r.precision, precision(c), 1e-12);
    EXPECT_NEAR(r.recall, recall(c), 1e-12);
  }
}

using Names = std::vector<std::string>;

TEST(PerClass, Perfect) {
  const Names y{"valid", "sqli", "xss", "path_traversal", "command_injection", "sqli"};
  auto rep = per_class_report(y, y);
  EXPECT_EQ(rep.size(), 5u);
  for (const auto& [name, m] : rep) {
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
  }
  EXPECT_EQ(rep.at("sqli").support, 2u);
  EXPECT_EQ(macro_recall(rep), 1.0);
}

TEST(PerClass, OneMisclassifiedXss) {
  const Names labels{"xss", "xss", "xss", "xss", "sqli", "sqli"};
  const Names preds{"xss", "xss", "xss", "sqli", "sqli", "sqli"};
  auto rep = per_class_report(preds, labels);
  EXPECT_DOUBLE_EQ(rep.at("xss").recall, 1.0 - 1.0 / 4);
  EXPECT_DOUBLE_EQ(rep.at("sqli").precision, 2.0 / 3);
  EXPECT_DOUBLE_EQ(rep.at("sqli").recall, 1.0);
  EXPECT_DOUBLE_EQ(macro_recall(rep), (0.75 + 1.0) / 2);
}

TEST(PerClass, AbsentFromPredictions) {
  const Names labels{"xss", "valid"};
  const Names preds{"valid", "valid"};
  auto rep = per_class_report(preds, labels);
  EXPECT_EQ(rep.at("xss").recall, 0.0);
  EXPECT_EQ(rep.at("xss").precision, 1.0);
  EXPECT_TRUE(rep.at("xss").precision_vacuous);
  const Names shorter{"valid"};
  EXPECT_THROW(per_class_report(shorter, labels), Error);
}

TEST(PerClass, CollapsesToBinaryConfusion) {
  Rng rng(2);
  const Names classes{"valid", "sqli", "xss", "path_traversal", "command_injection"};
  for (int t = 0; t < 50; ++t) {
    Names p, l;
    std::vector<int> pb, lb;
    for (int i = 0; i < 40; ++i) {
      p.push_back(classes[rng.below(5)]);
      l.push_back(classes[rng.below(5)]);
      pb.push_back(p.back() != "valid");
      lb.push_back(l.back() != "valid");
    }
    auto rep = per_class_report(p, l);
    const auto bin = confusion(pb, lb);
    // attack correctly called "an attack" = predicted non-valid on a non-valid label
    std::size_t attack_hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) attack_hits += (pb[i] && lb[i]);
    EXPECT_EQ(attack_hits, bin.tp);
    std::size_t support = 0, tp_sum = 0;
    for (const auto& [name, m] : rep) {
      support += m.support;
      tp_sum += m.counts.tp;
      EXPECT_EQ(m.counts.total(), p.size());
    }
    EXPECT_EQ(support, p.size());
    std::size_t exact = 0;
    for (std::size_t i = 0; i < p.size(); ++i) exact += p[i] == l[i];
    EXPECT_EQ(tp_sum, exact);
    // "valid" one-vs-rest is the attack/benign confusion with roles swapped
    ASSERT_TRUE(rep.contains("valid"));
    EXPECT_EQ(rep.at("valid").counts, cc(bin.tn, bin.fn, bin.tp, bin.fp));
  }
}

TEST(KFold, Examples) {
  auto f = kfold_indices(4, 2, 1);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].size(), 2u);
  EXPECT_EQ(f[1].size(), 2u);
  auto g = kfold_indices(5, 2, 1);
  EXPECT_EQ(g[0].size(), 3u);
  EXPECT_EQ(g[1].size(), 2u);
  try {
    kfold_indices(3, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::too_few_records);
  }
  EXPECT_THROW(kfold_indices(10, 1, 1), Error);
}

TEST(KFold, PartitionProperty) {
  for (std::size_t n = 2; n < 60; n += 3) {
    for (int k = 2; k <= static_cast<int>(std::min<std::size_t>(n, 12)); ++k) {
      auto folds = kfold_indices(n, k, n * 31 + static_cast<std::size_t>(k));
      ASSERT_EQ(folds.size(), static_cast<std::size_t>(k));
      std::set<std::size_t> seen;
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
        for (auto i : f) EXPECT_TRUE(seen.insert(i).second);
      }
      EXPECT_EQ(seen.size(), n);
      EXPECT_LE(hi - lo, 1u);
      EXPECT_EQ(kfold_indices(n, k, 7), kfold_indices(n, k, 7));
    }
  }
}

TEST(KFold, ConstantClassifierOnBalancedData) {
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i % 2);
  auto summary = kfold<int>(
      labels, 10, 3, [](std::vector<int>) { return 1; },
      [](int constant, std::vector<int> test) {
        std::vector<int> preds(test.size(), constant);
        return make_report(confusion(preds, test));
      });
  EXPECT_EQ(summary.folds.size(), 10u);
  EXPECT_NEAR(summary.mean_accuracy, 0.5, 1e-12);
  double var = 0;
  for (const auto& f : summary.folds) var += (f.accuracy - 0.5) * (f.accuracy - 0.5);
  EXPECT_NEAR(summary.std_accuracy, std::sqrt(var / 10), 1e-12);
}

struct GridData {
  Names train_x, train_y, val_x, val_y;
};

GridData grid_data() {
  GridData d;
  const std::vector<std::pair<std::string, std::string>> base{
      {"' or 1=1--", "sqli"},        {"union select pass from users", "sqli"}, {"<script>alert(1)</script>", "xss"},
      {"<img src=x onerror=alert(2)>", "xss"}, {"john smith", "valid"},   {"blue shoes 42", "valid"}};
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& [x, y] : base) {
      d.train_x.push_back(x + " " + std::to_string(rep));
      d.train_y.push_back(y);
    }
  }
  for (const auto& [x, y] : base) {
    d.val_x.push_back(x + " v");
    d.val_y.push_back(y);
  }
  return d;
}

TEST(GridSearch, SingleCellWins) {
  auto d = grid_data();
  const std::vector<GridCell> grid{{1, 2, svm::KernelKind::linear}};
  auto r = grid_search(d.train_x, d.train_y, d.val_x, d.val_y, grid, {});
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.best, 0u);
  ASSERT_TRUE(r.rows[0].score);
}

TEST(GridSearch, FullTableAndTieRule) {
  auto d = grid_data();
  const auto grid = default_grid();
  ASSERT_EQ(grid.size(), 6u);
  auto r = grid_search(d.train_x, d.train_y, d.val_x, d.val_y, grid, {});
  ASSERT_EQ(r.rows.size(), 6u);
  double best = -1;
  std::size_t first_best = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].cell, grid[i]);
    ASSERT_TRUE(r.rows[i].score);
    if (*r.rows[i].score > best) {
      best = *r.rows[i].score;
      first_best = i;
    }
  }
  EXPECT_EQ(r.best, first_best);
  EXPECT_EQ(*r.rows[r.best].score, best);

  const std::vector<GridCell> twins{{1, 2, svm::KernelKind::linear}, {1, 2, svm::KernelKind::linear}};
  EXPECT_EQ(grid_search(d.train_x, d.train_y, d.val_x, d.val_y, twins, {}).best, 0u);
  EXPECT_FALSE(format_grid_table(r).empty());
  EXPECT_EQ(to_json(r)["rows"].size(), 6u);
}

TEST(GridSearch, FailingCellsAreRecorded) {
  auto d = grid_data();
  const std::vector<GridCell> grid{{0, 1, svm::KernelKind::linear}, {1, 1, svm::KernelKind::linear}};
  auto r = grid_search(d.train_x, d.train_y, d.val_x, d.val_y, grid, {});
  EXPECT_FALSE(r.rows[0].score);
  EXPECT_FALSE(r.rows[0].error.empty());
  EXPECT_EQ(r.best, 1u);
  const std::vector<GridCell> all_bad{{0, 1, svm::KernelKind::linear}};
  EXPECT_THROW(grid_search(d.train_x, d.train_y, d.val_x, d.val_y, all_bad, {}), Error);
}

TEST(GridSearch, CrossValidated) {
  auto d = grid_data();
  const std::vector<GridCell> grid{{1, 1, svm::KernelKind::linear}, {1, 4, svm::KernelKind::rbf}};
  auto r = grid_search_cv(d.train_x, d.train_y, grid, 3, 5, {});
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.score);
    EXPECT_GE(*row.score, 0.0);
    EXPECT_LE(*row.score, 1.0);
  }
}

TEST(Reports, JsonAndTables) {
  auto a = make_report(cc(10, 3, 20, 1));
  auto b = make_report(cc(9, 0, 23, 2));
  auto j = to_json(a);
  EXPECT_EQ(j["confusion"]["tp"], 10);
  EXPECT_DOUBLE_EQ(j["accuracy"].get<double>(), 30.0 / 34.0);
  auto table = format_comparison_table(a, b);
  EXPECT_NE(table.find("False positive"), std::string::npos);
  const Names y{"xss", "sqli"};
  auto pc = per_class_report(y, y);
  EXPECT_NE(format_per_class_table(pc).find("sqli"), std::string::npos);
}

}  // namespace
}  // namespace dlwaf::eval
