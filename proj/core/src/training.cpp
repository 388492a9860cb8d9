// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/training.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>

#include "dlwaf/error.hpp"
#include "dlwaf/random.hpp"

namespace dlwaf::training {

Layer2Model fit_layer2(std::span<const std::string> texts, std::span<const std::string> labels,
                       const Layer2Config& config) {
  if (texts.size() != labels.size()) {
    throw Error(ErrorCode::length_mismatch, std::to_string(texts.size()) + " texts vs " +
                                                std::to_string(labels.size()) + " labels");
  }
  Layer2Model m;
  m.vocab = tfidf::fit_vocabulary(texts, config.ngram);
  std::vector<SparseVector> xs;
  xs.reserve(texts.size());
  for (const auto& t : texts) xs.push_back(m.vocab.transform(t));
  svm::KernelSpec kernel;
  kernel.kind = config.kernel;
  if (config.kernel == svm::KernelKind::rbf) kernel.gamma = config.gamma ? *config.gamma : svm::scale_gamma(xs, m.vocab.size());
  m.svm = svm::fit_multiclass(xs, labels, kernel, config.svm);
  return m;
}

std::vector<dtree::Sample> layer1_samples(std::span<const data::LabeledRecord> records,
                                          const features::Lexicon& lexicon,
                                          const http::InspectionOptions& inspection) {
  std::vector<dtree::Sample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.l1_label) continue;
    const auto text = data::inspection_text(r, inspection);
    out.push_back({features::extract_features(text, lexicon).as_row(), *r.l1_label});
  }
  return out;
}

namespace {

eval::EvalReport score_tree(const dtree::DecisionTreeModel& model, std::span<const dtree::Sample> test) {
  std::vector<int> preds;
  std::vector<int> labels;
  for (const auto& s : test) {
    preds.push_back(model.predict(s.x));
    labels.push_back(s.label);
  }
  return eval::make_report(eval::confusion(preds, labels));
}

}  // namespace

Layer1Result train_layer1(std::span<const data::LabeledRecord> records, const TrainConfig& config) {
  config.tree.validate();
  std::vector<data::LabeledRecord> labeled;
  for (const auto& r : records) {
    if (r.l1_label) labeled.push_back(r);
  }
  if (labeled.empty()) throw Error(ErrorCode::empty_dataset, "layer 1: no records with an l1 label");
  if (config.balance_l1) labeled = data::balance(std::move(labeled), derive_seed(config.seed, "balance"));

  auto samples = layer1_samples(labeled, config.lexicon, config.inspection);
  auto [train, test] = data::split(std::move(samples), config.split, derive_seed(config.seed, "split"));
  if (train.empty() || test.empty()) throw Error(ErrorCode::too_few_records, "layer 1: split leaves an empty side");

  dtree::DtConfig tree_cfg = config.tree;
  tree_cfg.seed = derive_seed(config.seed, "tree");

  Layer1Result result;
  result.model = dtree::fit(train, tree_cfg);
  result.report.n_train = train.size();
  result.report.n_test = test.size();
  result.report.holdout = score_tree(result.model, test);
  result.report.depth = result.model.depth();
  result.report.leaves = result.model.leaf_count();

  if (config.kfold > 0) {
    std::vector<dtree::Sample> all = train;
    all.insert(all.end(), test.begin(), test.end());
    result.report.cv = eval::kfold<dtree::Sample>(
        all, config.kfold, derive_seed(config.seed, "kfold"),
        [&](std::vector<dtree::Sample> fold_train) { return dtree::fit(std::move(fold_train), tree_cfg); },
        [](const dtree::DecisionTreeModel& m, std::vector<dtree::Sample> fold_test) {
          return score_tree(m, fold_test);
        });
  }
  return result;
}

Layer2Result train_layer2(std::span<const data::LabeledRecord> records, const TrainConfig& config) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& r : records) {
    if (!r.attack_class) continue;
    rows.emplace_back(data::inspection_text(r, config.inspection), std::string(data::to_string(*r.attack_class)));
  }
  if (rows.empty()) throw Error(ErrorCode::empty_dataset, "layer 2: no records with an attack class");
  auto [train, test] = data::split(std::move(rows), config.split, derive_seed(config.seed, "split"));
  if (train.empty()) throw Error(ErrorCode::too_few_records, "layer 2: split leaves no training records");

  std::vector<std::string> texts;
  std::vector<std::string> labels;
  for (auto& [t, l] : train) {
    texts.push_back(t);
    labels.push_back(l);
  }
  Layer2Config l2 = config.l2;
  l2.svm.seed = derive_seed(config.seed, "smo");

  Layer2Result result;
  result.model = fit_layer2(texts, labels, l2);
  result.report.n_train = train.size();
  result.report.n_test = test.size();
  result.report.converged = result.model.svm.converged();
  result.report.n_features = result.model.vocab.size();
  result.report.gamma = result.model.svm.kernel().kind == svm::KernelKind::rbf ? result.model.svm.kernel().gamma : 0.0;
  for (const auto& m : result.model.svm.models()) result.report.n_support_vectors += m.support_vectors.size();

  if (!test.empty()) {
    std::vector<std::string> preds;
    std::vector<std::string> truth;
    for (const auto& [t, l] : test) {
      preds.push_back(result.model.svm.predict_class(result.model.vocab.transform(t)));
      truth.push_back(l);
    }
    result.report.holdout = eval::per_class_report(preds, truth);
    result.report.macro_recall = eval::macro_recall(result.report.holdout);
  }
  return result;
}

nlohmann::json to_json(const TrainConfig& config) {
  nlohmann::json j;
  j["seed"] = config.seed;
  j["split"] = config.split;
  j["kfold"] = config.kfold;
  j["balance_l1"] = config.balance_l1;
  j["tree"] = {{"max_depth", config.tree.max_depth ? nlohmann::json(*config.tree.max_depth) : nlohmann::json(nullptr)},
               {"min_samples_split", config.tree.min_samples_split},
               {"min_samples_leaf", config.tree.min_samples_leaf}};
  j["l2"] = {{"ngram", nlohmann::json::array({config.l2.ngram.min_n, config.l2.ngram.max_n})},
             {"lowercase", config.l2.ngram.lowercase},
             {"max_features", config.l2.ngram.max_features ? nlohmann::json(*config.l2.ngram.max_features) : nlohmann::json(nullptr)},
             {"kernel", std::string(svm::to_string(config.l2.kernel))},
             {"gamma", config.l2.gamma ? nlohmann::json(*config.l2.gamma) : nlohmann::json(nullptr)},
             {"C", config.l2.svm.C},
             {"tol", config.l2.svm.tol},
             {"max_passes", config.l2.svm.max_passes},
             {"max_iterations", config.l2.svm.max_iterations}};
  j["lexicon_version"] = config.lexicon.version();
  j["inspection"] = {{"header_allowlist", config.inspection.header_allowlist},
                     {"max_decode_rounds", config.inspection.max_decode_rounds}};
  return j;
}

std::string training_fingerprint(std::span<const data::LabeledRecord> l1_records,
                                 std::span<const data::LabeledRecord> l2_records, const TrainConfig& config) {
  std::uint64_t a = fnv1a(to_json(config).dump());
  std::uint64_t b = fnv1a(features::to_json(config.lexicon).dump(), a);
  auto feed = [&](std::span<const data::LabeledRecord> records, std::string_view tag) {
    a = fnv1a(tag, a);
    for (const auto& r : records) {
      const auto line = data::to_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
      a = fnv1a(line, a);
      b = fnv1a(line, b ^ a);
    }
  };
  feed(l1_records, "l1");
  feed(l2_records, "l2");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                static_cast<unsigned long long>(b));
  return buf;
}

std::string build_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TrainResult train(std::span<const data::LabeledRecord> l1_records, std::span<const data::LabeledRecord> l2_records,
                  const TrainConfig& config) {
  auto l1 = train_layer1(l1_records, config);
  auto l2 = train_layer2(l2_records, config);
  TrainResult out;
  out.bundle.lexicon = config.lexicon;
  out.bundle.inspection = config.inspection;
  out.bundle.l1 = std::move(l1.model);
  out.bundle.vocab = std::move(l2.model.vocab);
  out.bundle.l2 = std::move(l2.model.svm);
  out.bundle.created_at = build_timestamp();
  out.bundle.training_fingerprint = training_fingerprint(l1_records, l2_records, config);
  out.bundle.validate();
  out.l1 = std::move(l1.report);
  out.l2 = std::move(l2.report);
  return out;
}

nlohmann::json to_json(const Layer1Report& report) {
  nlohmann::json j;
  j["n_train"] = report.n_train;
  j["n_test"] = report.n_test;
  j["holdout"] = eval::to_json(report.holdout);
  j["cv"] = report.cv ? eval::to_json(*report.cv) : nlohmann::json(nullptr);
  j["depth"] = report.depth;
  j["leaves"] = report.leaves;
  return j;
}

nlohmann::json to_json(const Layer2Report& report) {
  nlohmann::json j;
  j["n_train"] = report.n_train;
  j["n_test"] = report.n_test;
  j["holdout_per_class"] = eval::to_json(report.holdout);
  j["macro_recall"] = report.macro_recall;
  j["converged"] = report.converged;
  j["n_features"] = report.n_features;
  j["n_support_vectors"] = report.n_support_vectors;
  j["gamma"] = report.gamma;
  return j;
}

}  // namespace dlwaf::training
