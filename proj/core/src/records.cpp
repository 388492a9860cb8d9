// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include "dlwaf/datasets.hpp"

namespace dlwaf::data {

std::string_view to_string(AttackClass c) {
  switch (c) {
    case AttackClass::valid: return "valid";
    case AttackClass::sqli: return "sqli";
    case AttackClass::xss: return "xss";
    case AttackClass::path_traversal: return "path_traversal";
    case AttackClass::command_injection: return "command_injection";
  }
  return "valid";
}

std::optional<AttackClass> attack_class_from_string(std::string_view name) {
  for (AttackClass c : kAttackClasses) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

void LabeledRecord::validate() const {
  if (!l1_label && !attack_class) throw Error(ErrorCode::schema_violation, "record has neither l1_label nor attack_class");
  if (l1_label && *l1_label != 0 && *l1_label != 1) throw Error(ErrorCode::schema_violation, "l1_label must be 0 or 1");
  if (attack_class && *attack_class != AttackClass::valid && l1_label && *l1_label != 1) {
    throw Error(ErrorCode::schema_violation, "attack records must carry l1_label 1");
  }
}

void apply_canonical_label(LabeledRecord& record, std::string_view canonical) {
  if (canonical == "normal") {
    record.l1_label = 0;
    record.attack_class = AttackClass::valid;
  } else if (canonical == "anomalous") {
    record.l1_label = 1;
    record.attack_class.reset();
  } else if (auto c = attack_class_from_string(canonical)) {
    record.attack_class = *c;
    if (*c == AttackClass::valid) {
      record.l1_label.reset();
    } else {
      record.l1_label = 1;
    }
  } else {
    throw Error(ErrorCode::unmapped_label, "'" + std::string(canonical) + "' is not a canonical label");
  }
}

std::string inspection_text(const LabeledRecord& record, const http::InspectionOptions& options) {
  if (record.raw_request) return http::inspection_payload(*record.raw_request, options).text;
  return http::inspection_payload(record.payload, options).text;
}

namespace {

bool valid_utf8(const std::string& s) {
  try {
    (void)nlohmann::json(s).dump();
    return true;
  } catch (const nlohmann::json::type_error&) {
    return false;
  }
}

// Byte strings that are not UTF-8 are stored as {"latin1": ...}, one code point per byte.
nlohmann::json text_to_json(const std::string& s) {
  if (valid_utf8(s)) return s;
  std::string mapped;
  mapped.reserve(s.size() * 2);
  for (unsigned char c : s) {
    if (c < 0x80) {
      mapped += static_cast<char>(c);
    } else {
      mapped += static_cast<char>(0xC0 | (c >> 6));
      mapped += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return nlohmann::json{{"latin1", mapped}};
}

std::string text_from_json(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  const auto mapped = j.at("latin1").get<std::string>();
  std::string out;
  out.reserve(mapped.size());
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    const auto c = static_cast<unsigned char>(mapped[i]);
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if ((c == 0xC2 || c == 0xC3) && i + 1 < mapped.size()) {
      out += static_cast<char>(((c & 0x03) << 6) | (static_cast<unsigned char>(mapped[++i]) & 0x3F));
    } else {
      throw Error(ErrorCode::schema_violation, "latin1 text holds a code point above U+00FF");
    }
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const LabeledRecord& record) {
  nlohmann::json j;
  j["payload"] = text_to_json(record.payload);
  j["l1_label"] = record.l1_label ? nlohmann::json(*record.l1_label) : nlohmann::json(nullptr);
  j["attack_class"] = record.attack_class ? nlohmann::json(to_string(*record.attack_class)) : nlohmann::json(nullptr);
  j["source"] = record.source;
  j["raw_request"] = record.raw_request ? text_to_json(record.raw_request->raw) : nlohmann::json(nullptr);
  return j;
}

LabeledRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::schema_violation, "record is not an object");
  LabeledRecord r;
  try {
    r.payload = text_from_json(j.at("payload"));
    r.source = j.value("source", std::string());
    if (j.contains("l1_label") && !j.at("l1_label").is_null()) r.l1_label = j.at("l1_label").get<int>();
    if (j.contains("attack_class") && !j.at("attack_class").is_null()) {
      auto name = j.at("attack_class").get<std::string>();
      r.attack_class = attack_class_from_string(name);
      if (!r.attack_class) throw Error(ErrorCode::schema_violation, "unknown attack_class '" + name + "'");
    }
    if (j.contains("raw_request") && !j.at("raw_request").is_null()) {
      try {
        r.raw_request = http::parse_raw_request(text_from_json(j.at("raw_request")));
      } catch (const Error& e) {
        throw Error(ErrorCode::schema_violation, "raw_request: " + e.detail());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema_violation, e.what());
  }
  r.validate();
  return r;
}

void to_jsonl(std::span<const LabeledRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    out << to_json(r).dump() << '\n';
  }
}

void to_jsonl(std::span<const LabeledRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  to_jsonl(records, out);
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

std::vector<LabeledRecord> from_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::vector<LabeledRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::schema_violation, path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    try {
      records.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw Error(ErrorCode::schema_violation, path.string() + ":" + std::to_string(line_no) + ": " + e.detail());
    }
  }
  return records;
}

}  // namespace dlwaf::data
