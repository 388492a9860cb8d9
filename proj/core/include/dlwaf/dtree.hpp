// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlwaf/features.hpp"

namespace dlwaf::dtree {

using features::FeatureRow;

struct Sample {
  FeatureRow x{};
  int label = 0;  // 0 legitimate, 1 anomaly
};

struct DtConfig {
  std::optional<int> max_depth = 12;  // nullopt: unbounded
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  std::uint64_t seed = 0;

  /// Throws Error(invalid_argument) on inconsistent settings.
  void validate() const;
};

/// Flat tree node. Internal nodes send feature <= threshold left.
struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
  std::array<std::size_t, 2> counts{};  // training samples per class reaching this node

  bool is_leaf() const noexcept { return feature < 0; }
};

class DecisionTreeModel {
 public:
  DecisionTreeModel() = default;
  DecisionTreeModel(std::vector<Node> nodes, DtConfig config, std::array<std::size_t, 2> class_counts);

  int predict(const FeatureRow& x) const;
  int predict(const features::L1FeatureVector& fv) const { return predict(fv.as_row()); }

  /// Edges on the longest root-to-leaf path; a single leaf has depth 0.
  int depth() const;
  std::size_t leaf_count() const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const DtConfig& config() const noexcept { return config_; }
  const std::array<std::size_t, 2>& class_counts() const noexcept { return class_counts_; }

 private:
  std::vector<Node> nodes_;  // root at index 0
  DtConfig config_;
  std::array<std::size_t, 2> class_counts_{};
};

/// 1 - p0^2 - p1^2. Throws Error(empty_node) on empty input.
double gini(std::span<const int> labels);
double gini_counts(std::size_t n0, std::size_t n1);

struct Split {
  int feature = 0;
  double threshold = 0.0;
  double weighted_gini = 0.0;
};

/// Exhaustive search over midpoints of consecutive distinct values.
/// Returns nullopt when no split strictly lowers impurity or every improving
/// split leaves fewer than min_samples_leaf rows on a side. Ties go to the
/// lower feature index, then the lower threshold.
std::optional<Split> best_split(std::span<const Sample> rows, int min_samples_leaf = 1);

/// Grows a CART tree with Gini impurity. Throws Error(empty_dataset).
DecisionTreeModel fit(std::vector<Sample> data, const DtConfig& config = {});

nlohmann::json to_json(const DecisionTreeModel& model);
/// Throws Error(corrupt_bundle) on structural problems.
DecisionTreeModel tree_from_json(const nlohmann::json& j);

}  // namespace dlwaf::dtree
