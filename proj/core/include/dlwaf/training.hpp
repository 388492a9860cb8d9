// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlwaf/datasets.hpp"
#include "dlwaf/dtree.hpp"
#include "dlwaf/eval.hpp"
#include "dlwaf/pipeline.hpp"
#include "dlwaf/svm.hpp"
#include "dlwaf/tfidf.hpp"

namespace dlwaf::training {

struct Layer2Config {
  tfidf::NgramConfig ngram;
  svm::KernelKind kernel = svm::KernelKind::rbf;
  std::optional<double> gamma;  // nullopt: scale heuristic
  svm::SvmTrainConfig svm;
};

struct Layer2Model {
  tfidf::TfidfVocabulary vocab;
  svm::MulticlassSvmModel svm;
};

/// Vocabulary plus one-vs-rest SVM on already-decoded texts.
Layer2Model fit_layer2(std::span<const std::string> texts, std::span<const std::string> labels,
                       const Layer2Config& config);

/// Records without an l1_label are skipped.
std::vector<dtree::Sample> layer1_samples(std::span<const data::LabeledRecord> records,
                                          const features::Lexicon& lexicon,
                                          const http::InspectionOptions& inspection);

struct TrainConfig {
  std::uint64_t seed = 42;
  double split = 0.8;
  int kfold = 0;  // 0 skips cross-validation
  bool balance_l1 = true;
  dtree::DtConfig tree;
  Layer2Config l2;
  features::Lexicon lexicon = features::default_lexicon();
  http::InspectionOptions inspection;
};

struct Layer1Report {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  eval::EvalReport holdout;
  std::optional<eval::KFoldSummary> cv;
  int depth = 0;
  std::size_t leaves = 0;
};

struct Layer2Report {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  eval::PerClassReport holdout;
  double macro_recall = 0.0;
  bool converged = true;
  std::size_t n_features = 0;
  std::size_t n_support_vectors = 0;
  double gamma = 0.0;
};

struct Layer1Result {
  dtree::DecisionTreeModel model;
  Layer1Report report;
};

struct Layer2Result {
  Layer2Model model;
  Layer2Report report;
};

/// Balance (optional), split, fit on the training part, score the holdout,
/// and optionally k-fold cross-validate on the balanced set.
/// Throws Error(empty_dataset) when no record has an l1_label.
Layer1Result train_layer1(std::span<const data::LabeledRecord> records, const TrainConfig& config);

/// Split, fit on the training part, score per-class recall on the holdout.
/// Throws Error(empty_dataset) when no record has an attack class.
Layer2Result train_layer2(std::span<const data::LabeledRecord> records, const TrainConfig& config);

/// Hex digest over the training records and the effective configuration.
std::string training_fingerprint(std::span<const data::LabeledRecord> l1_records,
                                 std::span<const data::LabeledRecord> l2_records, const TrainConfig& config);

/// SOURCE_DATE_EPOCH when set, else the Unix epoch, as RFC 3339 UTC.
std::string build_timestamp();

struct TrainResult {
  WafModelBundle bundle;
  Layer1Report l1;
  Layer2Report l2;
};

TrainResult train(std::span<const data::LabeledRecord> l1_records, std::span<const data::LabeledRecord> l2_records,
                  const TrainConfig& config);

nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const Layer1Report& report);
nlohmann::json to_json(const Layer2Report& report);

}  // namespace dlwaf::training
