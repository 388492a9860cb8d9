// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/dtree.hpp"

#include <algorithm>
#include <numeric>

#include "dlwaf/error.hpp"
#include "dlwaf/random.hpp"

namespace dlwaf::dtree {
namespace {

constexpr double kImprovementEps = 1e-12;

std::optional<Split> search_split(std::span<const Sample> rows, int min_samples_leaf, bool strict) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;
  std::size_t total1 = 0;
  for (const auto& r : rows) total1 += static_cast<std::size_t>(r.label);
  const double parent = gini_counts(n - total1, total1);
  if (parent == 0.0) return std::nullopt;

  const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, min_samples_leaf));
  std::optional<Split> best;
  std::vector<std::size_t> order(n);

  for (int f = 0; f < static_cast<int>(std::tuple_size_v<FeatureRow>); ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].x[f] < rows[b].x[f]; });
    std::size_t left0 = 0, left1 = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const Sample& s = rows[order[k]];
      (s.label == 1 ? left1 : left0) += 1;
      const double here = s.x[f];
      const double next = rows[order[k + 1]].x[f];
      if (!(here < next)) continue;
      const std::size_t nl = k + 1;
      const std::size_t nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double weighted = (static_cast<double>(nl) * gini_counts(left0, left1) +
                               static_cast<double>(nr) * gini_counts((n - total1) - left0, total1 - left1)) /
                              static_cast<double>(n);
      if (strict ? weighted >= parent - kImprovementEps : weighted > parent + kImprovementEps) continue;
      if (!best || weighted < best->weighted_gini - kImprovementEps) {
        best = Split{f, here + (next - here) / 2.0, weighted};
      }
    }
  }
  return best;
}

class Builder {
 public:
  Builder(const DtConfig& config, std::vector<Sample> rows) : config_(config), rows_(std::move(rows)) {}

  std::vector<Node> build() {
    grow(0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::size_t begin, std::size_t end, int depth) {
    std::span<const Sample> rows(rows_.data() + begin, end - begin);
    std::array<std::size_t, 2> counts{};
    for (const auto& r : rows) ++counts[r.label];

    int index = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_[index].counts = counts;
    // Majority label, ties go to the anomaly class.
    nodes_[index].label = counts[1] >= counts[0] ? 1 : 0;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool depth_cap = config_.max_depth && depth >= *config_.max_depth;
    const bool too_small = rows.size() < static_cast<std::size_t>(config_.min_samples_split);
    if (pure || depth_cap || too_small) return index;

    // Zero-gain splits are allowed here so XOR-like nodes still get divided.
    std::optional<Split> split = search_split(rows, config_.min_samples_leaf, false);
    if (!split) return index;

    auto mid = std::stable_partition(rows_.begin() + begin, rows_.begin() + end,
                                     [&](const Sample& s) { return s.x[split->feature] <= split->threshold; });
    std::size_t cut = static_cast<std::size_t>(mid - rows_.begin());

    int left = grow(begin, cut, depth + 1);
    int right = grow(cut, end, depth + 1);
    nodes_[index].feature = split->feature;
    nodes_[index].threshold = split->threshold;
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
  }

  const DtConfig& config_;
  std::vector<Sample> rows_;
  std::vector<Node> nodes_;
};

}  // namespace

void DtConfig::validate() const {
  if (max_depth && *max_depth < 1) throw Error(ErrorCode::invalid_argument, "max_depth must be >= 1");
  if (min_samples_split < 2) throw Error(ErrorCode::invalid_argument, "min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw Error(ErrorCode::invalid_argument, "min_samples_leaf must be >= 1");
  if (min_samples_leaf > min_samples_split) {
    throw Error(ErrorCode::invalid_argument, "min_samples_leaf must not exceed min_samples_split");
  }
}

DecisionTreeModel::DecisionTreeModel(std::vector<Node> nodes, DtConfig config,
                                     std::array<std::size_t, 2> class_counts)
    : nodes_(std::move(nodes)), config_(config), class_counts_(class_counts) {}

int DecisionTreeModel::predict(const FeatureRow& x) const {
  if (nodes_.empty()) return 1;
  const Node* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return node->label;
}

int DecisionTreeModel::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> depth_of(nodes_.size(), 0);
  int deepest = 0;
  // Children always have larger indices than their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    deepest = std::max(deepest, depth_of[i]);
    if (!n.is_leaf()) {
      depth_of[n.left] = depth_of[i] + 1;
      depth_of[n.right] = depth_of[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

double gini_counts(std::size_t n0, std::size_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0) throw Error(ErrorCode::empty_node, "gini of an empty node");
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

double gini(std::span<const int> labels) {
  std::size_t n1 = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return gini_counts(labels.size() - n1, n1);
}

std::optional<Split> best_split(std::span<const Sample> rows, int min_samples_leaf) {
  return search_split(rows, min_samples_leaf, true);
}

DecisionTreeModel fit(std::vector<Sample> data, const DtConfig& config) {
  config.validate();
  if (data.empty()) throw Error(ErrorCode::empty_dataset, "decision tree needs at least one row");
  std::array<std::size_t, 2> counts{};
  for (const auto& s : data) {
    if (s.label != 0 && s.label != 1) throw Error(ErrorCode::invalid_argument, "labels must be 0 or 1");
    ++counts[s.label];
  }
  Rng rng(config.seed);
  shuffle(data, rng);
  std::vector<Node> nodes = Builder(config, std::move(data)).build();
  return DecisionTreeModel(std::move(nodes), config, counts);
}

namespace {

nlohmann::json node_to_json(const std::vector<Node>& nodes, int index) {
  const Node& n = nodes[index];
  if (n.is_leaf()) {
    return {{"label", n.label}, {"counts", {n.counts[0], n.counts[1]}}};
  }
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"counts", {n.counts[0], n.counts[1]}},
          {"left", node_to_json(nodes, n.left)},
          {"right", node_to_json(nodes, n.right)}};
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::corrupt_bundle, "l1 tree: " + why); }

int node_from_json(const nlohmann::json& j, std::vector<Node>& nodes) {
  if (!j.is_object()) corrupt("node is not an object");
  int index = static_cast<int>(nodes.size());
  nodes.push_back(Node{});
  Node node;
  if (j.contains("counts")) {
    auto c = j.at("counts").get<std::vector<std::size_t>>();
    if (c.size() != 2) corrupt("counts must have 2 entries");
    node.counts = {c[0], c[1]};
  }
  if (j.contains("label")) {
    node.label = j.at("label").get<int>();
    if (node.label != 0 && node.label != 1) corrupt("leaf label must be 0 or 1");
    nodes[index] = node;
    return index;
  }
  if (!j.contains("feature") || !j.contains("left") || !j.contains("right") || !j.contains("threshold")) {
    corrupt("internal node needs feature, threshold, left and right");
  }
  node.feature = j.at("feature").get<int>();
  if (node.feature < 0 || node.feature > 3) corrupt("feature index out of range");
  node.threshold = j.at("threshold").get<double>();
  node.left = node_from_json(j.at("left"), nodes);
  node.right = node_from_json(j.at("right"), nodes);
  nodes[index] = node;
  return index;
}

}  // namespace

nlohmann::json to_json(const DecisionTreeModel& model) {
  const DtConfig& c = model.config();
  nlohmann::json config = {{"criterion", "gini"},
                           {"max_depth", c.max_depth ? nlohmann::json(*c.max_depth) : nlohmann::json(nullptr)},
                           {"min_samples_split", c.min_samples_split},
                           {"min_samples_leaf", c.min_samples_leaf},
                           {"seed", c.seed}};
  nlohmann::json names = nlohmann::json::array();
  for (auto name : features::kFeatureNames) names.push_back(std::string(name));
  return {{"config", config},
          {"feature_names", names},
          {"class_counts", {model.class_counts()[0], model.class_counts()[1]}},
          {"root", node_to_json(model.nodes(), 0)}};
}

DecisionTreeModel tree_from_json(const nlohmann::json& j) {
  try {
    DtConfig config;
    const auto& c = j.at("config");
    if (c.value("criterion", std::string("gini")) != "gini") corrupt("unsupported criterion");
    config.max_depth = c.at("max_depth").is_null() ? std::nullopt : std::optional<int>(c.at("max_depth").get<int>());
    config.min_samples_split = c.at("min_samples_split").get<int>();
    config.min_samples_leaf = c.at("min_samples_leaf").get<int>();
    config.seed = c.at("seed").get<std::uint64_t>();
    auto counts = j.at("class_counts").get<std::vector<std::size_t>>();
    if (counts.size() != 2) corrupt("class_counts must have 2 entries");
    std::vector<Node> nodes;
    node_from_json(j.at("root"), nodes);
    DecisionTreeModel model(std::move(nodes), config, {counts[0], counts[1]});
    if (config.max_depth && model.depth() > *config.max_depth) corrupt("depth exceeds max_depth");
    return model;
  } catch (const nlohmann::json::exception& e) {
    corrupt(e.what());
  }
}

}  // namespace dlwaf::dtree
