// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/svm.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "dlwaf/error.hpp"
#include "dlwaf/random.hpp"

namespace dlwaf::svm {
namespace {

constexpr double kAlphaZero = 1e-12;
constexpr double kStepEps = 1e-6;

// Kernel rows computed on demand and kept up to a memory budget.
class KernelCache {
 public:
  KernelCache(std::span<const SparseVector> xs, const KernelSpec& spec, std::size_t budget_bytes = 256u << 20)
      : xs_(xs), spec_(spec), rows_(xs.size()) {
    norms_.reserve(xs.size());
    for (const auto& x : xs) norms_.push_back(x.squared_norm());
    const std::size_t row_bytes = std::max<std::size_t>(1, xs.size()) * sizeof(double);
    max_rows_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  std::size_t size() const { return xs_.size(); }

  double diag(std::size_t i) const { return spec_.kind == KernelKind::rbf ? 1.0 : norms_[i]; }

  std::shared_ptr<const std::vector<double>> row(std::size_t i) {
    if (!rows_[i]) {
      if (live_.size() >= max_rows_) {
        rows_[live_.front()].reset();
        live_.erase(live_.begin());
      }
      auto r = std::make_shared<std::vector<double>>(xs_.size());
      for (std::size_t k = 0; k < xs_.size(); ++k) (*r)[k] = eval(i, k);
      rows_[i] = std::move(r);
      live_.push_back(i);
    }
    return rows_[i];
  }

 private:
  double eval(std::size_t a, std::size_t b) const {
    const double d = dot(xs_[a], xs_[b]);
    if (spec_.kind == KernelKind::linear) return d;
    const double dist = std::max(0.0, norms_[a] + norms_[b] - 2.0 * d);
    return std::exp(-spec_.gamma * dist);
  }

  std::span<const SparseVector> xs_;
  KernelSpec spec_;
  std::vector<double> norms_;
  std::vector<std::shared_ptr<const std::vector<double>>> rows_;
  std::vector<std::size_t> live_;
  std::size_t max_rows_ = 0;
};

class Smo {
 public:
  Smo(KernelCache& k, std::span<const int> y, const SvmTrainConfig& cfg)
      : k_(k), y_(y), cfg_(cfg), n_(y.size()), alpha_(n_, 0.0), err_(n_), rng_(cfg.seed) {
    for (std::size_t i = 0; i < n_; ++i) err_[i] = -static_cast<double>(y_[i]);
  }

  void run() {
    int quiet_sweeps = 0;
    bool examine_all = true;
    while (quiet_sweeps < cfg_.max_passes && !exhausted()) {
      std::size_t changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_ && !exhausted(); ++i) changed += examine(i);
      } else {
        for (std::size_t i = 0; i < n_ && !exhausted(); ++i) {
          if (is_free(i)) changed += examine(i);
        }
      }
      if (examine_all) {
        quiet_sweeps = changed == 0 ? quiet_sweeps + 1 : 0;
        if (changed > 0) examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    converged_ = !exhausted();
    refine_bias();
  }

  const std::vector<double>& alphas() const { return alpha_; }
  double bias() const { return b_; }
  bool converged() const { return converged_; }
  std::int64_t iterations() const { return iterations_; }

 private:
  bool exhausted() const { return iterations_ >= cfg_.max_iterations; }
  bool is_free(std::size_t i) const { return alpha_[i] > kAlphaZero && alpha_[i] < cfg_.C - kAlphaZero; }

  std::size_t examine(std::size_t i2) {
    const double r2 = err_[i2] * y_[i2];
    const double a2 = alpha_[i2];
    if (!((r2 < -cfg_.tol && a2 < cfg_.C) || (r2 > cfg_.tol && a2 > 0.0))) return 0;

    // Second choice: largest |E1 - E2| among free multipliers.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == i2 || !is_free(i)) continue;
      const double gap = std::abs(err_[i] - err_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;

    const std::size_t start = rng_.below(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start + k) % n_;
      if (is_free(i1) && take_step(i1, i2)) return 1;
    }
    const std::size_t start2 = rng_.below(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start2 + k) % n_;
      if (!is_free(i1) && take_step(i1, i2)) return 1;
    }
    return 0;
  }

  // Dual objective restricted to the (i1, i2) pair, up to a constant.
  double pair_objective(double a1, double a2, double y1, double y2, double k11, double k12, double k22,
                        double v1, double v2) const {
    return a1 + a2 - 0.5 * k11 * a1 * a1 - 0.5 * k22 * a2 * a2 - y1 * y2 * k12 * a1 * a2 - y1 * a1 * v1 -
           y2 * a2 * v2;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double C = cfg_.C;
    const double a1 = alpha_[i1], a2 = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = err_[i1], e2 = err_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(C, C + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - C);
      hi = std::min(C, a1 + a2);
    }
    if (hi - lo < kAlphaZero) return false;

    const auto row2 = k_.row(i2);
    const double k11 = k_.diag(i1), k22 = k_.diag(i2), k12 = (*row2)[i1];
    const double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 1e-12) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Degenerate curvature: take the better end of the segment.
      const double v1 = e1 + y1 - b_ - a1 * y1 * k11 - a2 * y2 * k12;
      const double v2 = e2 + y2 - b_ - a1 * y1 * k12 - a2 * y2 * k22;
      const double gamma = a1 + s * a2;
      const double obj_lo = pair_objective(gamma - s * lo, lo, y1, y2, k11, k12, k22, v1, v2);
      const double obj_hi = pair_objective(gamma - s * hi, hi, y1, y2, k11, k12, k22, v1, v2);
      if (obj_lo > obj_hi + kStepEps) {
        a2_new = lo;
      } else if (obj_hi > obj_lo + kStepEps) {
        a2_new = hi;
      } else {
        a2_new = a2;
      }
    }
    if (std::abs(a2_new - a2) < kStepEps * (a2_new + a2 + kStepEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new < 0.0) a1_new = 0.0;
    if (a1_new > C) a1_new = C;

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1_new > kAlphaZero && a1_new < C - kAlphaZero) {
      b_new = b1;
    } else if (a2_new > kAlphaZero && a2_new < C - kAlphaZero) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }

    const auto row1 = k_.row(i1);
    const std::vector<double>& r1 = *row1;
    const std::vector<double>& r2 = *row2;
    const double db = b_new - b_;
    for (std::size_t k = 0; k < n_; ++k) err_[k] += d1 * r1[k] + d2 * r2[k] + db;

    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    b_ = b_new;
    ++iterations_;
    if (cfg_.on_step) cfg_.on_step(alpha_);
    return true;
  }

  // Average the bias over free multipliers, where the margin must be exact.
  void refine_bias() {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (is_free(i)) {
        sum += err_[i];
        ++count;
      }
    }
    if (count > 0) b_ -= sum / static_cast<double>(count);
  }

  KernelCache& k_;
  std::span<const int> y_;
  const SvmTrainConfig& cfg_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> err_;
  double b_ = 0.0;
  Rng rng_;
  std::int64_t iterations_ = 0;
  bool converged_ = true;
};

BinaryTrainResult train_with_cache(KernelCache& cache, std::span<const SparseVector> xs, std::span<const int> ys,
                                   const KernelSpec& kernel, const SvmTrainConfig& config) {
  Smo smo(cache, ys, config);
  smo.run();
  BinaryTrainResult result;
  result.alphas = smo.alphas();
  BinarySvmModel& m = result.model;
  m.kernel = kernel;
  m.bias = smo.bias();
  m.converged = smo.converged();
  m.iterations = smo.iterations();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (result.alphas[i] > kAlphaZero) {
      m.support_vectors.push_back(xs[i]);
      m.dual_coefs.push_back(result.alphas[i] * ys[i]);
    }
  }
  return result;
}

void check_binary_input(std::span<const SparseVector> xs, std::span<const int> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::length_mismatch, "vectors and labels differ in length");
  bool pos = false, neg = false;
  for (int y : ys) {
    if (y == 1) {
      pos = true;
    } else if (y == -1) {
      neg = true;
    } else {
      throw Error(ErrorCode::invalid_argument, "binary labels must be -1 or +1");
    }
  }
  if (!pos || !neg) throw Error(ErrorCode::single_class_data, "binary SVM needs both classes");
}

}  // namespace

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw Error(ErrorCode::invalid_argument, "rbf gamma must be positive");
  }
}

std::string_view to_string(KernelKind kind) { return kind == KernelKind::linear ? "linear" : "rbf"; }

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  throw Error(ErrorCode::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) {
  if (spec.kind == KernelKind::linear) return dot(a, b);
  return std::exp(-spec.gamma * squared_distance(a, b));
}

double scale_gamma(std::span<const SparseVector> xs, std::size_t n_features) {
  if (n_features == 0 || xs.empty()) return 1.0;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& x : xs) {
    for (const auto& e : x.entries) {
      sum += e.weight;
      sum_sq += e.weight * e.weight;
    }
  }
  const double cells = static_cast<double>(xs.size()) * static_cast<double>(n_features);
  const double mean = sum / cells;
  const double var = sum_sq / cells - mean * mean;
  const double nf = static_cast<double>(n_features);
  if (!(var > 0.0)) return 1.0 / nf;
  return 1.0 / (nf * var);
}

void SvmTrainConfig::validate() const {
  if (!(C > 0.0)) throw Error(ErrorCode::invalid_argument, "C must be positive");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
  if (max_passes < 1) throw Error(ErrorCode::invalid_argument, "max_passes must be >= 1");
  if (max_iterations < 1) throw Error(ErrorCode::invalid_argument, "max_iterations must be >= 1");
}

double BinarySvmModel::decision_value(const SparseVector& x) const {
  double sum = bias;
  if (kernel.kind == KernelKind::linear) {
    for (std::size_t i = 0; i < support_vectors.size(); ++i) sum += dual_coefs[i] * dot(support_vectors[i], x);
    return sum;
  }
  const double xx = x.squared_norm();
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    const double dist = std::max(0.0, support_vectors[i].squared_norm() + xx - 2.0 * dot(support_vectors[i], x));
    sum += dual_coefs[i] * std::exp(-kernel.gamma * dist);
  }
  return sum;
}

BinaryTrainResult train_binary(std::span<const SparseVector> xs, std::span<const int> ys, const KernelSpec& kernel,
                               const SvmTrainConfig& config) {
  kernel.validate();
  config.validate();
  check_binary_input(xs, ys);
  KernelCache cache(xs, kernel);
  return train_with_cache(cache, xs, ys, kernel, config);
}

BinarySvmModel fit_binary(std::span<const SparseVector> xs, std::span<const int> ys, const KernelSpec& kernel,
                          const SvmTrainConfig& config) {
  return train_binary(xs, ys, kernel, config).model;
}

MulticlassSvmModel::MulticlassSvmModel(std::vector<std::string> classes, std::vector<BinarySvmModel> models,
                                       KernelSpec kernel, double C)
    : classes_(std::move(classes)), models_(std::move(models)), kernel_(kernel), C_(C) {
  build_pool();
}

namespace {

struct EntriesHash {
  std::size_t operator()(const std::vector<SparseEntry>* v) const noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (const auto& e : *v) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &e.weight, sizeof bits);
      h = (h ^ e.index) * 1099511628211ULL;
      h = (h ^ bits) * 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct EntriesEq {
  bool operator()(const std::vector<SparseEntry>* a, const std::vector<SparseEntry>* b) const noexcept {
    if (a->size() != b->size()) return false;
    for (std::size_t i = 0; i < a->size(); ++i) {
      if ((*a)[i].index != (*b)[i].index || (*a)[i].weight != (*b)[i].weight) return false;
    }
    return true;
  }
};

}  // namespace

void MulticlassSvmModel::build_pool() {
  pool_.clear();
  refs_.assign(models_.size(), {});
  std::unordered_map<const std::vector<SparseEntry>*, std::uint32_t, EntriesHash, EntriesEq> seen;
  // Keys point into models_, which is not modified afterwards.
  for (std::size_t c = 0; c < models_.size(); ++c) {
    for (const auto& sv : models_[c].support_vectors) {
      auto [it, inserted] = seen.emplace(&sv.entries, static_cast<std::uint32_t>(pool_.size()));
      if (inserted) pool_.push_back(sv);
      refs_[c].push_back(it->second);
    }
  }
  pool_norms_.clear();
  dense_size_ = 0;
  for (const auto& sv : pool_) {
    pool_norms_.push_back(sv.squared_norm());
    if (!sv.entries.empty()) dense_size_ = std::max<std::size_t>(dense_size_, sv.entries.back().index + 1);
  }
}

std::vector<double> MulticlassSvmModel::decision_values(const SparseVector& x) const {
  thread_local std::vector<double> dense;
  if (dense.size() < dense_size_) dense.resize(dense_size_, 0.0);
  for (const auto& e : x.entries) {
    if (e.index < dense_size_) dense[e.index] = e.weight;
  }
  const double x_norm = x.squared_norm();
  std::vector<double> k(pool_.size());
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    double d = 0.0;
    for (const auto& e : pool_[i].entries) d += e.weight * dense[e.index];
    if (kernel_.kind == KernelKind::linear) {
      k[i] = d;
    } else {
      k[i] = std::exp(-kernel_.gamma * std::max(0.0, pool_norms_[i] + x_norm - 2.0 * d));
    }
  }
  for (const auto& e : x.entries) {
    if (e.index < dense_size_) dense[e.index] = 0.0;
  }
  std::vector<double> values(models_.size());
  for (std::size_t c = 0; c < models_.size(); ++c) {
    double sum = 0.0;
    const auto& coefs = models_[c].dual_coefs;
    for (std::size_t s = 0; s < coefs.size(); ++s) sum += coefs[s] * k[refs_[c][s]];
    values[c] = sum + models_[c].bias;
  }
  return values;
}

const std::string& MulticlassSvmModel::predict_class(const SparseVector& x) const {
  const auto values = decision_values(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < values.size(); ++c) {
    if (values[c] > values[best]) best = c;
  }
  return classes_.at(best);
}

bool MulticlassSvmModel::converged() const {
  return std::all_of(models_.begin(), models_.end(), [](const BinarySvmModel& m) { return m.converged; });
}

MulticlassSvmModel fit_multiclass(std::span<const SparseVector> xs, std::span<const std::string> labels,
                                  const KernelSpec& kernel, const SvmTrainConfig& config) {
  kernel.validate();
  config.validate();
  if (xs.size() != labels.size()) throw Error(ErrorCode::length_mismatch, "vectors and labels differ in length");
  std::vector<std::string> classes;
  for (const auto& l : labels) {
    if (std::find(classes.begin(), classes.end(), l) == classes.end()) classes.push_back(l);
  }
  if (classes.size() < 2) {
    throw Error(ErrorCode::single_class_data,
                "multi-class SVM needs at least two classes" + (classes.empty() ? std::string() : ", got only '" + classes[0] + "'"));
  }

  KernelCache cache(xs, kernel);
  std::vector<BinarySvmModel> models;
  std::vector<int> ys(xs.size());
  for (const auto& cls : classes) {
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = labels[i] == cls ? 1 : -1;
    try {
      models.push_back(train_with_cache(cache, xs, ys, kernel, config).model);
    } catch (const Error& e) {
      throw Error(e.code(), "class '" + cls + "': " + e.detail());
    }
  }
  return MulticlassSvmModel(std::move(classes), std::move(models), kernel, config.C);
}

nlohmann::json to_json(const MulticlassSvmModel& model) {
  nlohmann::json pool = nlohmann::json::array();
  for (const auto& sv : model.pool()) pool.push_back(to_json(sv));
  nlohmann::json models = nlohmann::json::array();
  for (std::size_t c = 0; c < model.models().size(); ++c) {
    const BinarySvmModel& m = model.models()[c];
    models.push_back({{"class", model.classes()[c]},
                      {"bias", m.bias},
                      {"converged", m.converged},
                      {"iterations", m.iterations},
                      {"dual_coefs", m.dual_coefs},
                      {"support_vectors", model.pool_refs()[c]}});
  }
  return {{"kernel", {{"kind", std::string(to_string(model.kernel().kind))}, {"gamma", model.kernel().gamma}}},
          {"C", model.C()},
          {"classes", model.classes()},
          {"support_vectors", std::move(pool)},
          {"models", std::move(models)}};
}

MulticlassSvmModel multiclass_from_json(const nlohmann::json& j) {
  auto corrupt = [](const std::string& why) { return Error(ErrorCode::corrupt_bundle, "l2 svm: " + why); };
  try {
    KernelSpec kernel;
    try {
      kernel.kind = kernel_kind_from_string(j.at("kernel").at("kind").get<std::string>());
      kernel.gamma = j.at("kernel").at("gamma").get<double>();
      kernel.validate();
    } catch (const Error& e) {
      throw corrupt(e.detail());
    }
    const double C = j.at("C").get<double>();
    if (!(C > 0.0)) throw corrupt("C must be positive");
    auto classes = j.at("classes").get<std::vector<std::string>>();
    const auto& jm = j.at("models");
    std::vector<SparseVector> pool;
    for (const auto& sv : j.at("support_vectors")) pool.push_back(sparse_from_json(sv));
    if (classes.size() < 2 || jm.size() != classes.size()) throw corrupt("need one binary model per class, >= 2 classes");
    std::vector<BinarySvmModel> models;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto& m = jm[c];
      if (m.at("class").get<std::string>() != classes[c]) throw corrupt("model order does not match classes");
      BinarySvmModel b;
      b.kernel = kernel;
      b.bias = m.at("bias").get<double>();
      b.converged = m.at("converged").get<bool>();
      b.iterations = m.at("iterations").get<std::int64_t>();
      b.dual_coefs = m.at("dual_coefs").get<std::vector<double>>();
      for (const auto& ref : m.at("support_vectors")) {
        const auto r = ref.get<std::size_t>();
        if (r >= pool.size()) throw corrupt("class '" + classes[c] + "': support vector reference out of range");
        b.support_vectors.push_back(pool[r]);
      }
      if (b.support_vectors.empty() || b.support_vectors.size() != b.dual_coefs.size()) {
        throw corrupt("class '" + classes[c] + "': support vector and coefficient counts differ or are zero");
      }
      double balance = 0.0;
      for (double coef : b.dual_coefs) {
        if (!(std::abs(coef) > 0.0) || std::abs(coef) > C * (1.0 + 1e-9)) {
          throw corrupt("class '" + classes[c] + "': |alpha| outside (0, C]");
        }
        balance += coef;
      }
      if (std::abs(balance) > 1e-6) throw corrupt("class '" + classes[c] + "': sum alpha*y != 0");
      models.push_back(std::move(b));
    }
    return MulticlassSvmModel(std::move(classes), std::move(models), kernel, C);
  } catch (const nlohmann::json::exception& e) {
    throw corrupt(e.what());
  }
}

}  // namespace dlwaf::svm
