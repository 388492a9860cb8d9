// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dlwaf {

enum class ErrorCode {
  malformed_request,
  empty_node,
  empty_dataset,
  empty_corpus,
  single_class_data,
  contract_violation,
  unsupported_version,
  corrupt_bundle,
  io_error,
  empty_file,
  missing_column,
  unmapped_label,
  schema_violation,
  manifest_error,
  empty_confusion,
  length_mismatch,
  too_few_records,
  invalid_argument,
  bind_error,
  bundle_load_error,
};

/// CamelCase name of an error code, e.g. "SingleClassData".
std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. what() is
/// "<CodeName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dlwaf
