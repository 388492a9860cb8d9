// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/sparse_vector.hpp"

#include "dlwaf/error.hpp"

namespace dlwaf {

double SparseVector::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * e.weight;
  return s;
}

bool SparseVector::well_formed() const noexcept {
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k - 1].index >= entries[k].index) return false;
  }
  return true;
}

double dot(const SparseVector& a, const SparseVector& b) noexcept {
  double s = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      s += ia->weight * ib->weight;
      ++ia;
      ++ib;
    }
  }
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) noexcept {
  double d = a.squared_norm() + b.squared_norm() - 2.0 * dot(a, b);
  return d < 0.0 ? 0.0 : d;
}

nlohmann::json to_json(const SparseVector& v) {
  nlohmann::json idx = nlohmann::json::array();
  nlohmann::json w = nlohmann::json::array();
  for (const auto& e : v.entries) {
    idx.push_back(e.index);
    w.push_back(e.weight);
  }
  return {{"i", std::move(idx)}, {"w", std::move(w)}};
}

SparseVector sparse_from_json(const nlohmann::json& j) {
  const auto& idx = j.at("i");
  const auto& w = j.at("w");
  if (!idx.is_array() || !w.is_array() || idx.size() != w.size()) {
    throw Error(ErrorCode::corrupt_bundle, "sparse vector index/weight arrays differ in length");
  }
  SparseVector v;
  v.entries.reserve(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    v.entries.push_back({idx[k].get<std::uint32_t>(), w[k].get<double>()});
  }
  if (!v.well_formed()) throw Error(ErrorCode::corrupt_bundle, "sparse vector indices not increasing");
  return v;
}

}  // namespace dlwaf
