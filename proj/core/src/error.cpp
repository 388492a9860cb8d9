// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/error.hpp"

namespace dlwaf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_request: return "MalformedRequest";
    case ErrorCode::empty_node: return "EmptyNode";
    case ErrorCode::empty_dataset: return "EmptyDataset";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::single_class_data: return "SingleClassData";
    case ErrorCode::contract_violation: return "ContractViolation";
    case ErrorCode::unsupported_version: return "UnsupportedVersion";
    case ErrorCode::corrupt_bundle: return "CorruptBundle";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::empty_file: return "EmptyFile";
    case ErrorCode::missing_column: return "MissingColumn";
    case ErrorCode::unmapped_label: return "UnmappedLabel";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::manifest_error: return "ManifestError";
    case ErrorCode::empty_confusion: return "EmptyConfusion";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::too_few_records: return "TooFewRecords";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::bind_error: return "BindError";
    case ErrorCode::bundle_load_error: return "BundleLoadError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace dlwaf
