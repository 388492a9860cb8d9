// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlwaf/datasets.hpp"

namespace dlwaf::data {

struct SyntheticOptions {
  /// Share of the "valid" class that is ordinary traffic (l1 = 0). The rest
  /// are benign anomalies: typos and punctuation-heavy but harmless input.
  double normal_share_of_valid = 0.75;
};

/// Seeded labeled mini-corpus of raw HTTP requests. Class i % 5 is assigned
/// to the i-th record before shuffling, so class counts differ by at most one.
std::vector<LabeledRecord> generate_synthetic_corpus(std::size_t size, std::uint64_t seed,
                                                     const SyntheticOptions& options = {});

/// Loose, human-readable indicator rules per attack class. Returns one message
/// per attack record whose decoded text shows none of its class indicators.
std::vector<std::string> synthetic_self_check(std::span<const LabeledRecord> records);

}  // namespace dlwaf::data
