// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>

#include "dlwaf/eval.hpp"

namespace dlwaf::eval {

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

}  // namespace

nlohmann::json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

nlohmann::json to_json(const PerClassReport& report) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [cls, m] : report) {
    j[cls] = {{"precision", m.precision},
              {"recall", m.recall},
              {"support", m.support},
              {"precision_vacuous", m.precision_vacuous},
              {"recall_vacuous", m.recall_vacuous},
              {"confusion", to_json(m.counts)}};
  }
  return j;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["confusion"] = to_json(report.confusion);
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["precision_vacuous"] = report.precision_vacuous;
  j["recall_vacuous"] = report.recall_vacuous;
  j["per_class"] = report.per_class ? to_json(*report.per_class) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const KFoldSummary& summary) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : summary.folds) folds.push_back(to_json(f));
  return {{"k", summary.folds.size()},
          {"mean_accuracy", summary.mean_accuracy},
          {"std_accuracy", summary.std_accuracy},
          {"mean_precision", summary.mean_precision},
          {"mean_recall", summary.mean_recall},
          {"folds", folds}};
}

nlohmann::json to_json(const GridResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"ngram", nlohmann::json::array({r.cell.min_n, r.cell.max_n})},
                    {"kernel", std::string(svm::to_string(r.cell.kernel))},
                    {"macro_recall", r.score ? nlohmann::json(*r.score) : nlohmann::json(nullptr)},
                    {"converged", r.converged},
                    {"error", r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error)}});
  }
  return {{"rows", rows}, {"best", result.best}};
}

std::string format_comparison_table(const EvalReport& layer1, const EvalReport& combined) {
  std::string out;
  out += fmt("%-16s %14s %14s\n", "", "Layer 1 only", "Dual layer");
  out += fmt("%-16s %14zu %14zu\n", "True positive", layer1.confusion.tp, combined.confusion.tp);
  out += fmt("%-16s %14zu %14zu\n", "True negative", layer1.confusion.tn, combined.confusion.tn);
  out += fmt("%-16s %14zu %14zu\n", "False positive", layer1.confusion.fp, combined.confusion.fp);
  out += fmt("%-16s %14zu %14zu\n", "False negative", layer1.confusion.fn, combined.confusion.fn);
  out += fmt("%-16s %14.4f %14.4f\n", "Accuracy", layer1.accuracy, combined.accuracy);
  out += fmt("%-16s %13.4f%s %13.4f%s\n", "Precision", layer1.precision, layer1.precision_vacuous ? "*" : " ",
             combined.precision, combined.precision_vacuous ? "*" : " ");
  out += fmt("%-16s %13.4f%s %13.4f%s\n", "Recall", layer1.recall, layer1.recall_vacuous ? "*" : " ",
             combined.recall, combined.recall_vacuous ? "*" : " ");
  return out;
}

std::string format_per_class_table(const PerClassReport& report) {
  std::string out = fmt("%-20s %10s %10s %8s\n", "Class", "Precision", "Recall", "Support");
  for (const auto& [cls, m] : report) {
    out += fmt("%-20s %9.4f%s %9.4f%s %8zu\n", cls.c_str(), m.precision, m.precision_vacuous ? "*" : " ", m.recall,
               m.recall_vacuous ? "*" : " ", m.support);
  }
  return out;
}

std::string format_grid_table(const GridResult& result) {
  std::string out = fmt("%-8s %-8s %14s\n", "ngram", "kernel", "macro recall");
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    const std::string ngram = fmt("(%d,%d)", r.cell.min_n, r.cell.max_n);
    const std::string score = r.score ? fmt("%.4f", *r.score) : std::string("failed");
    out += fmt("%-8s %-8s %14s%s%s\n", ngram.c_str(), std::string(svm::to_string(r.cell.kernel)).c_str(),
               score.c_str(), i == result.best ? "  <- best" : "", r.converged ? "" : "  (not converged)");
  }
  return out;
}

}  // namespace dlwaf::eval
