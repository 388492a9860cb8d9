// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include "dlwaf/error.hpp"
#include "dlwaf/pipeline.hpp"

namespace dlwaf {

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::corrupt_bundle, what); }

}  // namespace

void WafModelBundle::validate() const {
  if (format_version != kBundleFormatVersion) corrupt("format_version is not " + std::string(kBundleFormatVersion));
  if (inspection.max_decode_rounds < 1) corrupt("inspection.max_decode_rounds must be >= 1");
  if (l1.nodes().empty()) corrupt("l1 tree has no nodes");
  const auto n_nodes = static_cast<int>(l1.nodes().size());
  for (const auto& node : l1.nodes()) {
    if (node.feature < 0) continue;
    if (node.feature >= static_cast<int>(features::kFeatureNames.size())) corrupt("l1 split feature out of range");
    if (node.left <= 0 || node.left >= n_nodes || node.right <= 0 || node.right >= n_nodes) {
      corrupt("l1 child index out of range");
    }
  }
  if (vocab.size() == 0) corrupt("vocabulary is empty");
  if (vocab.idf().size() != vocab.size()) corrupt("vocabulary idf length differs from token count");
  if (l2.classes().size() < 2) corrupt("l2 needs at least two classes");
  if (l2.models().size() != l2.classes().size()) corrupt("l2 model count differs from class count");
  for (std::size_t c = 0; c < l2.models().size(); ++c) {
    const auto& m = l2.models()[c];
    if (m.support_vectors.empty()) corrupt("l2 class " + l2.classes()[c] + " has no support vectors");
    for (const auto& sv : m.support_vectors) {
      for (const auto& e : sv.entries) {
        if (e.index >= vocab.size()) {
          corrupt("l2 support vector index " + std::to_string(e.index) + " >= vocabulary size " +
                  std::to_string(vocab.size()));
        }
      }
    }
  }
}

nlohmann::json bundle_to_json(const WafModelBundle& bundle) {
  nlohmann::json j;
  j["format_version"] = bundle.format_version;
  j["created_at"] = bundle.created_at;
  j["training_fingerprint"] = bundle.training_fingerprint;
  j["inspection"] = {{"header_allowlist", bundle.inspection.header_allowlist},
                     {"max_decode_rounds", bundle.inspection.max_decode_rounds}};
  j["lexicon"] = features::to_json(bundle.lexicon);
  j["l1"] = dtree::to_json(bundle.l1);
  j["vocabulary"] = tfidf::to_json(bundle.vocab);
  j["l2"] = svm::to_json(bundle.l2);
  return j;
}

WafModelBundle bundle_from_json(const nlohmann::json& j) {
  if (!j.is_object()) corrupt("bundle is not a JSON object");
  if (!j.contains("format_version") || !j["format_version"].is_string()) corrupt("missing format_version");
  const auto version = j["format_version"].get<std::string>();
  if (version != kBundleFormatVersion) {
    throw Error(ErrorCode::unsupported_version, "bundle format " + version + ", expected " +
                                                    std::string(kBundleFormatVersion));
  }
  WafModelBundle b;
  try {
    b.created_at = j.at("created_at").get<std::string>();
    b.training_fingerprint = j.at("training_fingerprint").get<std::string>();
    const auto& insp = j.at("inspection");
    b.inspection.header_allowlist = insp.at("header_allowlist").get<std::vector<std::string>>();
    b.inspection.max_decode_rounds = insp.at("max_decode_rounds").get<int>();
  } catch (const nlohmann::json::exception& e) {
    corrupt(e.what());
  }
  try {
    b.lexicon = features::lexicon_from_json(j.at("lexicon"));
  } catch (const Error& e) {
    corrupt(std::string("lexicon: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("lexicon: ") + e.what());
  }
  try {
    b.l1 = dtree::tree_from_json(j.at("l1"));
    b.vocab = tfidf::vocabulary_from_json(j.at("vocabulary"));
    b.l2 = svm::multiclass_from_json(j.at("l2"));
  } catch (const nlohmann::json::exception& e) {
    corrupt(e.what());
  }
  b.validate();
  return b;
}

void save_bundle(const WafModelBundle& bundle, const std::filesystem::path& path) {
  bundle.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << bundle_to_json(bundle).dump() << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path.string());
}

WafModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    corrupt(path.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

}  // namespace dlwaf
