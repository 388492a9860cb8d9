// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include "dlwaf/eval.hpp"
#include "dlwaf/training.hpp"

namespace dlwaf::eval {

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "k must be >= 2");
  if (n < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::too_few_records, std::to_string(n) + " records for " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(idx, rng);
  const auto kk = static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> folds(kk);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t len = n / kk + (f < n % kk ? 1 : 0);
    folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return folds;
}

KFoldSummary summarize(std::vector<EvalReport> folds) {
  KFoldSummary s;
  s.folds = std::move(folds);
  if (s.folds.empty()) return s;
  const auto n = static_cast<double>(s.folds.size());
  for (const auto& r : s.folds) {
    s.mean_accuracy += r.accuracy;
    s.mean_precision += r.precision;
    s.mean_recall += r.recall;
  }
  s.mean_accuracy /= n;
  s.mean_precision /= n;
  s.mean_recall /= n;
  double var = 0.0;
  for (const auto& r : s.folds) var += (r.accuracy - s.mean_accuracy) * (r.accuracy - s.mean_accuracy);
  s.std_accuracy = std::sqrt(var / n);
  return s;
}

std::vector<GridCell> default_grid() {
  std::vector<GridCell> grid;
  for (auto [lo, hi] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{1, 4}}) {
    for (auto kind : {svm::KernelKind::linear, svm::KernelKind::rbf}) grid.push_back({lo, hi, kind});
  }
  return grid;
}

namespace {

training::Layer2Config cell_config(const GridCell& cell, const GridOptions& options) {
  training::Layer2Config cfg;
  cfg.ngram = options.ngram_base;
  cfg.ngram.min_n = cell.min_n;
  cfg.ngram.max_n = cell.max_n;
  cfg.kernel = cell.kernel;
  cfg.gamma = options.gamma;
  cfg.svm = options.svm;
  return cfg;
}

// Returns macro recall and whether every binary fit converged.
std::pair<double, bool> score_cell(const GridCell& cell, const GridOptions& options,
                                   std::span<const std::string> train_texts, std::span<const std::string> train_labels,
                                   std::span<const std::string> val_texts, std::span<const std::string> val_labels) {
  const auto model = training::fit_layer2(train_texts, train_labels, cell_config(cell, options));
  std::vector<std::string> preds;
  preds.reserve(val_texts.size());
  for (const auto& t : val_texts) preds.push_back(model.svm.predict_class(model.vocab.transform(t)));
  return {macro_recall(per_class_report(preds, val_labels)), model.svm.converged()};
}

GridResult finish(std::vector<GridRow> rows, const std::string& last_error) {
  GridResult result;
  result.rows = std::move(rows);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (!result.rows[i].score) continue;
    if (!best || *result.rows[i].score > *result.rows[*best].score) best = i;
  }
  if (!best) throw Error(ErrorCode::invalid_argument, "every grid cell failed; last error: " + last_error);
  result.best = *best;
  return result;
}

}  // namespace

GridResult grid_search(std::span<const std::string> train_texts, std::span<const std::string> train_labels,
                       std::span<const std::string> val_texts, std::span<const std::string> val_labels,
                       std::span<const GridCell> grid, const GridOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty grid");
  if (val_texts.size() != val_labels.size()) throw Error(ErrorCode::length_mismatch, "validation texts vs labels");
  if (val_texts.empty()) throw Error(ErrorCode::empty_dataset, "empty validation split");
  std::vector<GridRow> rows;
  std::string last_error;
  for (const auto& cell : grid) {
    GridRow row;
    row.cell = cell;
    try {
      auto [score, converged] = score_cell(cell, options, train_texts, train_labels, val_texts, val_labels);
      row.score = score;
      row.converged = converged;
    } catch (const Error& e) {
      row.error = e.what();
      last_error = row.error;
    }
    rows.push_back(std::move(row));
  }
  return finish(std::move(rows), last_error);
}

GridResult grid_search_cv(std::span<const std::string> texts, std::span<const std::string> labels,
                          std::span<const GridCell> grid, int k, std::uint64_t seed, const GridOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty grid");
  if (texts.size() != labels.size()) throw Error(ErrorCode::length_mismatch, "texts vs labels");
  const auto folds = kfold_indices(texts.size(), k, seed);
  std::vector<GridRow> rows;
  std::string last_error;
  for (const auto& cell : grid) {
    GridRow row;
    row.cell = cell;
    try {
      double sum = 0.0;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::string> tr_t, tr_l, va_t, va_l;
        for (std::size_t g = 0; g < folds.size(); ++g) {
          for (std::size_t idx : folds[g]) {
            (g == f ? va_t : tr_t).push_back(texts[idx]);
            (g == f ? va_l : tr_l).push_back(labels[idx]);
          }
        }
        auto [score, converged] = score_cell(cell, options, tr_t, tr_l, va_t, va_l);
        sum += score;
        row.converged = row.converged && converged;
      }
      row.score = sum / static_cast<double>(folds.size());
    } catch (const Error& e) {
      row.error = e.what();
      last_error = row.error;
    }
    rows.push_back(std::move(row));
  }
  return finish(std::move(rows), last_error);
}

}  // namespace dlwaf::eval
