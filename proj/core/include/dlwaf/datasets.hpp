// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlwaf/error.hpp"
#include "dlwaf/http_request.hpp"
#include "dlwaf/random.hpp"

namespace dlwaf::data {

enum class AttackClass { valid, sqli, xss, path_traversal, command_injection };

inline constexpr std::array<AttackClass, 5> kAttackClasses{
    AttackClass::valid, AttackClass::sqli, AttackClass::xss, AttackClass::path_traversal,
    AttackClass::command_injection};

std::string_view to_string(AttackClass c);
std::optional<AttackClass> attack_class_from_string(std::string_view name);

struct LabeledRecord {
  /// Payload text, or the full raw request text when raw_request is set.
  std::string payload;
  std::optional<int> l1_label;
  std::optional<AttackClass> attack_class;
  std::string source;
  std::optional<http::HttpRequest> raw_request;

  /// Throws Error(schema_violation) when no label is present, l1_label is not
  /// 0/1, or an attack class carries l1_label 0.
  void validate() const;

  friend bool operator==(const LabeledRecord&, const LabeledRecord&) = default;
};

/// Canonical label names used by manifests: "normal", "anomalous", or one of
/// the attack class names. Throws Error(unmapped_label) for anything else.
void apply_canonical_label(LabeledRecord& record, std::string_view canonical);

/// Decoded text both detection layers see for this record.
std::string inspection_text(const LabeledRecord& record, const http::InspectionOptions& options = {});

// Manifest ----------------------------------------------------------------------

enum class SourceFormat { raw_http_blocks, payload_csv, jsonl };

struct SourceEntry {
  std::string name;
  std::filesystem::path path;
  SourceFormat format = SourceFormat::jsonl;
  std::map<std::string, std::string> label_mapping;  // source label -> canonical label
  std::string file_label;                            // raw_http_blocks: label of every block
  std::string payload_column;                        // payload_csv
  std::string class_column;                          // payload_csv
};

struct CorpusManifest {
  std::vector<SourceEntry> sources;
};

/// Relative paths resolve against base_dir. Throws Error(manifest_error).
CorpusManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
CorpusManifest load_manifest(const std::filesystem::path& path);

// Loaders -----------------------------------------------------------------------

struct LoadWarning {
  std::size_t block = 0;  // 1-based block (or row) number
  std::string message;
};

struct LoadResult {
  std::vector<LabeledRecord> records;
  std::vector<LoadWarning> warnings;
};

/// Requests separated by blank lines. A request whose headers announce a
/// non-zero Content-Length takes the following non-blank lines as its body.
/// Unparseable blocks are skipped with a warning.
/// Throws Error(io_error) or Error(empty_file).
LoadResult load_raw_http_blocks(const std::filesystem::path& path, std::string_view canonical_label,
                                const std::string& source);
LoadResult load_raw_http_blocks(const SourceEntry& entry);

/// RFC 4180 parsing: quoted fields may contain commas, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Throws Error(missing_column) or Error(unmapped_label).
std::vector<LabeledRecord> load_payload_csv(const SourceEntry& entry);

LoadResult load_source(const SourceEntry& entry);

// Preprocessing -----------------------------------------------------------------

struct CleanReport {
  std::size_t input = 0;
  std::size_t missing = 0;
  std::size_t duplicates = 0;
  std::size_t outliers = 0;
  std::size_t output = 0;
};

nlohmann::json to_json(const CleanReport& report);

/// Length outliers: longer than kOutlierFactor times the 99.9th percentile
/// (nearest rank) of payload lengths, re-evaluated until nothing is dropped.
inline constexpr double kOutlierFactor = 2.0;

/// Drops empty payloads, exact duplicate payloads (first kept) and length
/// outliers. Idempotent.
std::pair<std::vector<LabeledRecord>, CleanReport> clean(std::vector<LabeledRecord> records);

/// Undersamples the majority l1 class to the minority count, then shuffles.
/// Throws Error(schema_violation) when a record lacks l1_label and
/// Error(single_class_data) when one class is absent.
std::vector<LabeledRecord> balance(std::vector<LabeledRecord> records, std::uint64_t seed);

std::vector<LabeledRecord> merge(std::vector<std::vector<LabeledRecord>> lists, std::uint64_t seed);

/// Seeded shuffle, then the first floor(n * train_fraction) items train.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::vector<T> items, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "train fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  shuffle(items, rng);
  const auto cut = static_cast<std::size_t>(static_cast<double>(items.size()) * train_fraction);
  std::vector<T> test(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(cut)),
                      std::make_move_iterator(items.end()));
  items.resize(cut);
  return {std::move(items), std::move(test)};
}

// JSON lines --------------------------------------------------------------------

nlohmann::json to_json(const LabeledRecord& record);
/// Throws Error(schema_violation).
LabeledRecord record_from_json(const nlohmann::json& j);

void to_jsonl(std::span<const LabeledRecord> records, const std::filesystem::path& path);
void to_jsonl(std::span<const LabeledRecord> records, std::ostream& out);
/// Blank lines are skipped. Throws Error(schema_violation) naming the line.
std::vector<LabeledRecord> from_jsonl(const std::filesystem::path& path);

}  // namespace dlwaf::data
