// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "dlwaf/eval.hpp"

namespace dlwaf::eval {

double precision(const ConfusionCounts& c) noexcept {
  if (c.tp + c.fp == 0) return 1.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const ConfusionCounts& c) noexcept {
  if (c.tp + c.fn == 0) return 1.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::empty_confusion, "accuracy of an empty confusion table");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::length_mismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw Error(ErrorCode::empty_confusion, "no predictions to tally");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool l = labels[i] == 1;
    if (p && l) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (l) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

PerClassReport per_class_report(std::span<const std::string> predictions, std::span<const std::string> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::length_mismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                std::to_string(labels.size()) + " labels");
  }
  std::set<std::string> classes(labels.begin(), labels.end());
  classes.insert(predictions.begin(), predictions.end());
  PerClassReport report;
  for (const auto& cls : classes) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool p = predictions[i] == cls;
      const bool l = labels[i] == cls;
      if (p && l) {
        ++c.tp;
      } else if (p) {
        ++c.fp;
      } else if (l) {
        ++c.fn;
      } else {
        ++c.tn;
      }
    }
    ClassMetrics m;
    m.counts = c;
    m.precision = precision(c);
    m.recall = recall(c);
    m.support = c.tp + c.fn;
    m.precision_vacuous = precision_vacuous(c);
    m.recall_vacuous = recall_vacuous(c);
    report.emplace(cls, m);
  }
  return report;
}

double macro_recall(const PerClassReport& report) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [cls, m] : report) {
    if (m.support == 0) continue;
    sum += m.recall;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

EvalReport make_report(const ConfusionCounts& c) {
  EvalReport r;
  r.confusion = c;
  r.accuracy = accuracy(c);
  r.precision = precision(c);
  r.recall = recall(c);
  r.precision_vacuous = precision_vacuous(c);
  r.recall_vacuous = recall_vacuous(c);
  return r;
}

}  // namespace dlwaf::eval
