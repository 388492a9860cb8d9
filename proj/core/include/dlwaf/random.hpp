// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace dlwaf {

/// Seeded generator whose draws do not depend on the standard library's
/// distribution implementations, so shuffles are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::size_t below(std::size_t bound);

  /// Uniform double in [0, 1).
  double uniform();

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

/// Independent named sub-stream of a master seed ("split", "balance", "smo", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = rng.below(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// 64-bit FNV-1a, used for fingerprints.
std::uint64_t fnv1a(std::string_view data, std::uint64_t basis = 14695981039346656037ULL);

}  // namespace dlwaf
