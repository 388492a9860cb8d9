// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlwaf/error.hpp"
#include "dlwaf/random.hpp"
#include "dlwaf/svm.hpp"
#include "dlwaf/tfidf.hpp"

namespace dlwaf::eval {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// tp / (tp + fp); 1.0 when there are no positive predictions (vacuous).
double precision(const ConfusionCounts& c) noexcept;
/// tp / (tp + fn); 1.0 when there are no positive labels (vacuous).
double recall(const ConfusionCounts& c) noexcept;
/// (tp + tn) / total. Throws Error(empty_confusion) when total is 0.
double accuracy(const ConfusionCounts& c);

inline bool precision_vacuous(const ConfusionCounts& c) noexcept { return c.tp + c.fp == 0; }
inline bool recall_vacuous(const ConfusionCounts& c) noexcept { return c.tp + c.fn == 0; }

/// Positive class is 1. Throws Error(length_mismatch) or Error(empty_confusion).
ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels);

struct ClassMetrics {
  double precision = 1.0;
  double recall = 1.0;
  std::size_t support = 0;
  bool precision_vacuous = false;
  bool recall_vacuous = false;
  ConfusionCounts counts;
};

using PerClassReport = std::map<std::string, ClassMetrics>;

/// One-vs-rest counts for every class seen in either list.
PerClassReport per_class_report(std::span<const std::string> predictions, std::span<const std::string> labels);

/// Mean recall over classes with support > 0.
double macro_recall(const PerClassReport& report);

struct EvalReport {
  ConfusionCounts confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_vacuous = false;
  bool recall_vacuous = false;
  std::optional<PerClassReport> per_class;
};

EvalReport make_report(const ConfusionCounts& c);

// Cross-validation -----------------------------------------------------------------

/// Seeded shuffle of 0..n-1 cut into k contiguous folds; the first n % k
/// folds hold one extra index. Throws Error(too_few_records) when n < k and
/// Error(invalid_argument) when k < 2.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed);

struct KFoldSummary {
  std::vector<EvalReport> folds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population standard deviation
  double mean_precision = 0.0;
  double mean_recall = 0.0;
};

KFoldSummary summarize(std::vector<EvalReport> folds);

/// train_fn(std::vector<T> train) -> Model; eval_fn(const Model&, std::vector<T> test) -> EvalReport.
template <typename T, typename TrainFn, typename EvalFn>
KFoldSummary kfold(std::span<const T> records, int k, std::uint64_t seed, TrainFn&& train_fn, EvalFn&& eval_fn) {
  const auto folds = kfold_indices(records.size(), k, seed);
  std::vector<EvalReport> reports;
  reports.reserve(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<T> train;
    std::vector<T> test;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      auto& dst = g == f ? test : train;
      for (std::size_t idx : folds[g]) dst.push_back(records[idx]);
    }
    auto model = train_fn(std::move(train));
    reports.push_back(eval_fn(model, std::move(test)));
  }
  return summarize(std::move(reports));
}

// Grid search ------------------------------------------------------------------------

struct GridCell {
  int min_n = 1;
  int max_n = 1;
  svm::KernelKind kernel = svm::KernelKind::rbf;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// n-gram ranges (1,1), (1,2), (1,4) crossed with linear and rbf kernels.
std::vector<GridCell> default_grid();

struct GridOptions {
  svm::SvmTrainConfig svm;  // C = 10 by default
  tfidf::NgramConfig ngram_base;  // min_n / max_n overridden per cell
  std::optional<double> gamma;  // nullopt: scale heuristic
};

struct GridRow {
  GridCell cell;
  std::optional<double> score;  // macro recall; absent when the cell failed
  std::string error;
  bool converged = true;
};

struct GridResult {
  std::vector<GridRow> rows;  // declared grid order
  std::size_t best = 0;
};

/// Fits a vocabulary and one-vs-rest SVM per cell on the training split and
/// scores macro recall on the validation split. Ties go to the earlier cell.
/// Throws the last cell's error only when every cell fails.
GridResult grid_search(std::span<const std::string> train_texts, std::span<const std::string> train_labels,
                       std::span<const std::string> val_texts, std::span<const std::string> val_labels,
                       std::span<const GridCell> grid, const GridOptions& options);

/// Same, with each cell scored by mean macro recall over k folds.
GridResult grid_search_cv(std::span<const std::string> texts, std::span<const std::string> labels,
                          std::span<const GridCell> grid, int k, std::uint64_t seed, const GridOptions& options);

// Reports ------------------------------------------------------------------------------

nlohmann::json to_json(const ConfusionCounts& c);
nlohmann::json to_json(const PerClassReport& report);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const KFoldSummary& summary);
nlohmann::json to_json(const GridResult& result);

/// Side-by-side confusion table (layer 1 alone vs both layers).
std::string format_comparison_table(const EvalReport& layer1, const EvalReport& combined);
std::string format_per_class_table(const PerClassReport& report);
std::string format_grid_table(const GridResult& result);

}  // namespace dlwaf::eval
