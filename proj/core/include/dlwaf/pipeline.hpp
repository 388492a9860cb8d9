// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dlwaf/datasets.hpp"
#include "dlwaf/dtree.hpp"
#include "dlwaf/eval.hpp"
#include "dlwaf/features.hpp"
#include "dlwaf/http_request.hpp"
#include "dlwaf/svm.hpp"
#include "dlwaf/tfidf.hpp"

namespace dlwaf {

inline constexpr std::string_view kBundleFormatVersion = "1";
inline constexpr std::string_view kValidClass = "valid";

enum class Action { allow, block };

std::string_view to_string(Action action);

struct Verdict {
  Action action = Action::allow;
  int l1_flag = 0;
  std::optional<std::string> l2_class;  // present iff l1_flag == 1
  features::L1FeatureVector features;
  std::string reason;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

nlohmann::json to_json(const Verdict& verdict);

/// The three-rule table: (0, -) allow, (1, 0) allow, (1, 1) block.
/// Throws Error(contract_violation) when l2 is present with l1 = 0, absent
/// with l1 = 1, or either flag is not 0/1.
Action decision_rule(int l1, std::optional<int> l2);

/// Builds a verdict from a Layer-1 flag. layer2 is called only when the flag is 1.
Verdict decide(const features::L1FeatureVector& fv, int l1_flag, const std::function<std::string()>& layer2);

struct WafModelBundle {
  std::string format_version{kBundleFormatVersion};
  features::Lexicon lexicon = features::default_lexicon();
  http::InspectionOptions inspection;
  dtree::DecisionTreeModel l1;
  tfidf::TfidfVocabulary vocab;
  svm::MulticlassSvmModel l2;
  std::string created_at;
  std::string training_fingerprint;

  /// Throws Error(corrupt_bundle) naming the first violated invariant.
  void validate() const;
};

Verdict classify(const WafModelBundle& bundle, const http::HttpRequest& req);
/// Verdict for a bare payload string (decoded like a request payload).
Verdict classify_payload(const WafModelBundle& bundle, std::string_view payload);
/// Verdict for text that is already an inspection payload.
Verdict classify_text(const WafModelBundle& bundle, std::string_view text);

/// Layer-2 class for inspection text, bypassing the Layer-1 gate.
std::string layer2_class(const WafModelBundle& bundle, std::string_view text);

nlohmann::json bundle_to_json(const WafModelBundle& bundle);
/// Throws Error(unsupported_version) or Error(corrupt_bundle).
WafModelBundle bundle_from_json(const nlohmann::json& j);

void save_bundle(const WafModelBundle& bundle, const std::filesystem::path& path);
/// Throws Error(io_error), Error(unsupported_version) or Error(corrupt_bundle).
WafModelBundle load_bundle(const std::filesystem::path& path);

// Corpus-level comparison -----------------------------------------------------------

/// Ground truth per record: attack_class != valid when a class is present,
/// else l1_label.
std::optional<int> threat_label(const data::LabeledRecord& record);

struct ComparisonReport {
  eval::EvalReport layer1_only;  // positive = Layer-1 flag
  eval::EvalReport combined;     // positive = block
  std::optional<eval::PerClassReport> layer2;  // records with an attack class, gate bypassed
  std::size_t n_records = 0;
};

/// Throws Error(empty_dataset) when no record carries a label.
ComparisonReport evaluate_bundle(const WafModelBundle& bundle, std::span<const data::LabeledRecord> records);

nlohmann::json to_json(const ComparisonReport& report);
std::string format_report_table(const ComparisonReport& report);

}  // namespace dlwaf
