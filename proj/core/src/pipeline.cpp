// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/pipeline.hpp"

#include <iomanip>
#include <sstream>

#include "dlwaf/error.hpp"

namespace dlwaf {

std::string_view to_string(Action action) { return action == Action::block ? "block" : "allow"; }

nlohmann::json to_json(const Verdict& verdict) {
  nlohmann::json j;
  j["action"] = std::string(to_string(verdict.action));
  j["l1"] = verdict.l1_flag;
  j["l2_class"] = verdict.l2_class ? nlohmann::json(*verdict.l2_class) : nlohmann::json(nullptr);
  j["features"] = features::to_json(verdict.features);
  j["reason"] = verdict.reason;
  return j;
}

Action decision_rule(int l1, std::optional<int> l2) {
  if (l1 != 0 && l1 != 1) throw Error(ErrorCode::contract_violation, "l1 flag must be 0 or 1");
  if (l2 && *l2 != 0 && *l2 != 1) throw Error(ErrorCode::contract_violation, "l2 flag must be 0 or 1");
  if (l1 == 0) {
    if (l2) throw Error(ErrorCode::contract_violation, "l2 present although l1 = 0");
    return Action::allow;
  }
  if (!l2) throw Error(ErrorCode::contract_violation, "l2 absent although l1 = 1");
  return *l2 == 1 ? Action::block : Action::allow;
}

Verdict decide(const features::L1FeatureVector& fv, int l1_flag, const std::function<std::string()>& layer2) {
  Verdict v;
  v.features = fv;
  v.l1_flag = l1_flag;
  if (l1_flag == 0) {
    v.action = decision_rule(0, std::nullopt);
    v.reason = "normal traffic";
    return v;
  }
  v.l2_class = layer2();
  const int threat = *v.l2_class == kValidClass ? 0 : 1;
  v.action = decision_rule(l1_flag, threat);
  v.reason = threat ? "anomaly and attack: " + *v.l2_class : "anomaly, not attack";
  return v;
}

std::string layer2_class(const WafModelBundle& bundle, std::string_view text) {
  return bundle.l2.predict_class(bundle.vocab.transform(text));
}

Verdict classify_text(const WafModelBundle& bundle, std::string_view text) {
  const auto fv = features::extract_features(text, bundle.lexicon);
  return decide(fv, bundle.l1.predict(fv), [&] { return layer2_class(bundle, text); });
}

Verdict classify(const WafModelBundle& bundle, const http::HttpRequest& req) {
  return classify_text(bundle, http::inspection_payload(req, bundle.inspection).text);
}

Verdict classify_payload(const WafModelBundle& bundle, std::string_view payload) {
  return classify_text(bundle, http::inspection_payload(payload, bundle.inspection).text);
}

std::optional<int> threat_label(const data::LabeledRecord& record) {
  if (record.attack_class) return *record.attack_class == data::AttackClass::valid ? 0 : 1;
  return record.l1_label;
}

ComparisonReport evaluate_bundle(const WafModelBundle& bundle, std::span<const data::LabeledRecord> records) {
  std::vector<int> truth;
  std::vector<int> l1_pred;
  std::vector<int> combined_pred;
  std::vector<std::string> cls_truth;
  std::vector<std::string> cls_pred;
  for (const auto& r : records) {
    const auto label = threat_label(r);
    if (!label) continue;
    const std::string text = data::inspection_text(r, bundle.inspection);
    const Verdict v = classify_text(bundle, text);
    truth.push_back(*label);
    l1_pred.push_back(v.l1_flag);
    combined_pred.push_back(v.action == Action::block ? 1 : 0);
    if (r.attack_class) {
      cls_truth.emplace_back(data::to_string(*r.attack_class));
      cls_pred.push_back(v.l2_class ? *v.l2_class : layer2_class(bundle, text));
    }
  }
  if (truth.empty()) throw Error(ErrorCode::empty_dataset, "no labeled records to evaluate");
  ComparisonReport report;
  report.n_records = truth.size();
  report.layer1_only = eval::make_report(eval::confusion(l1_pred, truth));
  report.combined = eval::make_report(eval::confusion(combined_pred, truth));
  if (!cls_truth.empty()) report.layer2 = eval::per_class_report(cls_pred, cls_truth);
  return report;
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["n_records"] = report.n_records;
  j["layer1_only"] = eval::to_json(report.layer1_only);
  j["combined"] = eval::to_json(report.combined);
  j["layer2_per_class"] = report.layer2 ? eval::to_json(*report.layer2) : nlohmann::json(nullptr);
  return j;
}

std::string format_report_table(const ComparisonReport& report) {
  std::string out = eval::format_comparison_table(report.layer1_only, report.combined);
  if (report.layer2) {
    out += "\n";
    out += eval::format_per_class_table(*report.layer2);
  }
  return out;
}

}  // namespace dlwaf
