// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlwaf/sparse_vector.hpp"

namespace dlwaf::svm {

enum class KernelKind { linear, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;  // rbf only

  void validate() const;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

/// linear: <a, b>; rbf: exp(-gamma * |a - b|^2)
double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b);

/// 1 / (n_features * variance of all entries of the implied dense matrix),
/// or 1 / n_features when that variance is zero.
double scale_gamma(std::span<const SparseVector> xs, std::size_t n_features);

struct SvmTrainConfig {
  double C = 10.0;
  double tol = 1e-3;
  int max_passes = 10;
  std::int64_t max_iterations = 200000;
  std::uint64_t seed = 0;
  /// Called with the full alpha vector after every accepted pair update.
  std::function<void(std::span<const double>)> on_step;

  void validate() const;
};

struct BinarySvmModel {
  std::vector<SparseVector> support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  KernelSpec kernel;
  bool converged = true;
  std::int64_t iterations = 0;

  /// sum_i dual_coefs_i * K(sv_i, x) + bias
  double decision_value(const SparseVector& x) const;
};

struct BinaryTrainResult {
  BinarySvmModel model;
  std::vector<double> alphas;  // one per training point, in input order
};

/// Soft-margin SVM trained with sequential minimal optimization. Labels are
/// -1/+1. Throws Error(single_class_data) unless both labels occur. Hitting
/// max_iterations returns the current model with converged = false.
BinaryTrainResult train_binary(std::span<const SparseVector> xs, std::span<const int> ys,
                               const KernelSpec& kernel, const SvmTrainConfig& config);

BinarySvmModel fit_binary(std::span<const SparseVector> xs, std::span<const int> ys,
                          const KernelSpec& kernel, const SvmTrainConfig& config);

/// One-vs-rest over string class labels.
class MulticlassSvmModel {
 public:
  MulticlassSvmModel() = default;
  MulticlassSvmModel(std::vector<std::string> classes, std::vector<BinarySvmModel> models,
                     KernelSpec kernel, double C);

  /// Argmax of per-class decision values; ties go to the earlier class.
  const std::string& predict_class(const SparseVector& x) const;
  /// Per-class decision values. Kernel values are computed once per distinct
  /// support vector and shared across classes.
  std::vector<double> decision_values(const SparseVector& x) const;

  bool converged() const;
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::vector<BinarySvmModel>& models() const noexcept { return models_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  double C() const noexcept { return C_; }

  /// Distinct support vectors across all classes.
  const std::vector<SparseVector>& pool() const noexcept { return pool_; }
  /// pool index of each support vector of class c, parallel to models()[c].support_vectors.
  const std::vector<std::vector<std::uint32_t>>& pool_refs() const noexcept { return refs_; }

 private:
  void build_pool();

  std::vector<std::string> classes_;
  std::vector<BinarySvmModel> models_;
  KernelSpec kernel_;
  double C_ = 10.0;
  std::vector<SparseVector> pool_;
  std::vector<double> pool_norms_;
  std::vector<std::vector<std::uint32_t>> refs_;
  std::size_t dense_size_ = 0;
};

/// Classes are ordered by first appearance. Throws Error(single_class_data)
/// when fewer than two classes are present; per-class failures are rethrown
/// with the class name in the message.
MulticlassSvmModel fit_multiclass(std::span<const SparseVector> xs, std::span<const std::string> labels,
                                  const KernelSpec& kernel, const SvmTrainConfig& config);

nlohmann::json to_json(const MulticlassSvmModel& model);
/// Validates dual feasibility; throws Error(corrupt_bundle).
MulticlassSvmModel multiclass_from_json(const nlohmann::json& j);

}  // namespace dlwaf::svm
