// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dlwaf/datasets.hpp"

namespace dlwaf::data {
namespace {

// Nearest-rank percentile of a non-empty sample.
std::size_t percentile_length(std::vector<std::size_t> lengths, double pct) {
  std::sort(lengths.begin(), lengths.end());
  const auto n = static_cast<double>(lengths.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, lengths.size());
  return lengths[rank - 1];
}

}  // namespace

nlohmann::json to_json(const CleanReport& report) {
  return {{"input", report.input},
          {"missing", report.missing},
          {"duplicates", report.duplicates},
          {"outliers", report.outliers},
          {"output", report.output}};
}

std::pair<std::vector<LabeledRecord>, CleanReport> clean(std::vector<LabeledRecord> records) {
  CleanReport report;
  report.input = records.size();

  std::vector<LabeledRecord> kept;
  kept.reserve(records.size());
  std::unordered_set<std::string> seen;
  for (auto& r : records) {
    if (r.payload.empty()) {
      ++report.missing;
    } else if (!seen.insert(r.payload).second) {
      ++report.duplicates;
    } else {
      kept.push_back(std::move(r));
    }
  }

  while (!kept.empty()) {
    std::vector<std::size_t> lengths;
    lengths.reserve(kept.size());
    for (const auto& r : kept) lengths.push_back(r.payload.size());
    const double limit = kOutlierFactor * static_cast<double>(percentile_length(lengths, 99.9));
    auto tail = std::stable_partition(kept.begin(), kept.end(), [&](const LabeledRecord& r) {
      return static_cast<double>(r.payload.size()) <= limit;
    });
    const auto dropped = static_cast<std::size_t>(kept.end() - tail);
    if (dropped == 0) break;
    report.outliers += dropped;
    kept.erase(tail, kept.end());
  }
  report.output = kept.size();
  return {std::move(kept), report};
}

std::vector<LabeledRecord> balance(std::vector<LabeledRecord> records, std::uint64_t seed) {
  std::vector<LabeledRecord> by_class[2];
  for (auto& r : records) {
    if (!r.l1_label) throw Error(ErrorCode::schema_violation, "balance needs l1_label on every record");
    by_class[*r.l1_label == 1 ? 1 : 0].push_back(std::move(r));
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error(ErrorCode::single_class_data, "balance needs both normal and anomalous records");
  }
  Rng rng(seed);
  const std::size_t keep = std::min(by_class[0].size(), by_class[1].size());
  std::vector<LabeledRecord> out;
  out.reserve(2 * keep);
  for (auto& group : by_class) {
    if (group.size() > keep) {
      // Draw `keep` records without replacement, preserving their relative order.
      std::vector<std::size_t> idx(group.size());
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
      shuffle(idx, rng);
      idx.resize(keep);
      std::sort(idx.begin(), idx.end());
      for (std::size_t k : idx) out.push_back(std::move(group[k]));
    } else {
      for (auto& r : group) out.push_back(std::move(r));
    }
  }
  shuffle(out, rng);
  return out;
}

std::vector<LabeledRecord> merge(std::vector<std::vector<LabeledRecord>> lists, std::uint64_t seed) {
  std::vector<LabeledRecord> out;
  for (auto& list : lists) {
    for (auto& r : list) out.push_back(std::move(r));
  }
  Rng rng(seed);
  shuffle(out, rng);
  return out;
}

}  // namespace dlwaf::data
