// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace dlwaf {

struct SparseEntry {
  std::uint32_t index = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Entries with strictly increasing indices; absent indices are zero.
struct SparseVector {
  std::vector<SparseEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t nnz() const noexcept { return entries.size(); }
  double squared_norm() const noexcept;
  /// True when indices strictly increase.
  bool well_formed() const noexcept;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

double dot(const SparseVector& a, const SparseVector& b) noexcept;
double squared_distance(const SparseVector& a, const SparseVector& b) noexcept;

/// {"i": [...], "w": [...]}
nlohmann::json to_json(const SparseVector& v);
SparseVector sparse_from_json(const nlohmann::json& j);

}  // namespace dlwaf
