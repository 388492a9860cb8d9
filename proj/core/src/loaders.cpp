// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dlwaf/datasets.hpp"

namespace dlwaf::data {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

std::size_t content_length(const std::vector<std::string_view>& head) {
  for (std::size_t i = 1; i < head.size(); ++i) {
    std::string_view line = head[i];
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    if (!http::iequals(line.substr(0, colon), "Content-Length")) continue;
    std::string_view v = line.substr(colon + 1);
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    std::size_t n = 0;
    std::from_chars(v.data(), v.data() + v.size(), n);
    return n;
  }
  return 0;
}

std::string mapped_label(const SourceEntry& entry, const std::string& source_label) {
  if (entry.label_mapping.empty()) return source_label;
  auto it = entry.label_mapping.find(source_label);
  if (it == entry.label_mapping.end()) {
    throw Error(ErrorCode::unmapped_label,
                entry.name + ": label '" + source_label + "' has no entry in label_mapping");
  }
  return it->second;
}

}  // namespace

LoadResult load_raw_http_blocks(const std::filesystem::path& path, std::string_view canonical_label,
                                const std::string& source) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (std::all_of(lines.begin(), lines.end(), is_blank)) throw Error(ErrorCode::empty_file, path.string() + " has no requests");

  LoadResult result;
  std::size_t i = 0;
  std::size_t block = 0;
  while (i < lines.size()) {
    if (is_blank(lines[i])) {
      ++i;
      continue;
    }
    ++block;
    std::vector<std::string_view> head;
    while (i < lines.size() && !is_blank(lines[i])) head.push_back(lines[i++]);

    std::string raw;
    for (auto line : head) {
      raw += line;
      raw += "\r\n";
    }
    raw += "\r\n";
    if (content_length(head) > 0) {
      while (i < lines.size() && is_blank(lines[i])) ++i;
      bool first = true;
      while (i < lines.size() && !is_blank(lines[i])) {
        if (!first) raw += "\n";
        raw += lines[i++];
        first = false;
      }
    }

    try {
      LabeledRecord record;
      record.raw_request = http::parse_raw_request(raw);
      record.payload = raw;
      record.source = source;
      apply_canonical_label(record, canonical_label);
      result.records.push_back(std::move(record));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::unmapped_label) throw;
      result.warnings.push_back({block, e.what()});
    }
  }
  return result;
}

LoadResult load_raw_http_blocks(const SourceEntry& entry) {
  return load_raw_http_blocks(entry.path, mapped_label(entry, entry.file_label), entry.name);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // CRLF handled on '\n'
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<LabeledRecord> load_payload_csv(const SourceEntry& entry) {
  const std::string text = read_file(entry.path);
  auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorCode::empty_file, entry.path.string() + " has no header row");
  const auto& header = rows.front();
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::missing_column, entry.path.string() + ": no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t payload_col = column(entry.payload_column);
  const std::size_t class_col = column(entry.class_column);

  std::vector<LabeledRecord> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() <= std::max(payload_col, class_col)) {
      throw Error(ErrorCode::schema_violation,
                  entry.path.string() + ": row " + std::to_string(r + 1) + " has too few fields");
    }
    LabeledRecord record;
    record.payload = row[payload_col];
    record.source = entry.name;
    apply_canonical_label(record, mapped_label(entry, row[class_col]));
    records.push_back(std::move(record));
  }
  return records;
}

LoadResult load_source(const SourceEntry& entry) {
  switch (entry.format) {
    case SourceFormat::raw_http_blocks:
      return load_raw_http_blocks(entry);
    case SourceFormat::payload_csv:
      return {load_payload_csv(entry), {}};
    case SourceFormat::jsonl: {
      LoadResult result{from_jsonl(entry.path), {}};
      for (auto& r : result.records) {
        if (r.source.empty()) r.source = entry.name;
      }
      return result;
    }
  }
  return {};
}

CorpusManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::manifest_error, why); };
  if (!j.is_object() || !j.contains("sources") || !j.at("sources").is_array()) {
    throw bad("manifest needs a 'sources' array");
  }
  CorpusManifest manifest;
  try {
    for (const auto& s : j.at("sources")) {
      SourceEntry e;
      e.name = s.at("name").get<std::string>();
      std::filesystem::path p = s.at("path").get<std::string>();
      e.path = p.is_absolute() ? p : base_dir / p;
      const auto fmt = s.at("format").get<std::string>();
      if (fmt == "raw_http_blocks") {
        e.format = SourceFormat::raw_http_blocks;
      } else if (fmt == "payload_csv") {
        e.format = SourceFormat::payload_csv;
      } else if (fmt == "jsonl") {
        e.format = SourceFormat::jsonl;
      } else {
        throw bad(e.name + ": unknown format '" + fmt + "'");
      }
      if (s.contains("label_mapping")) e.label_mapping = s.at("label_mapping").get<std::map<std::string, std::string>>();
      e.file_label = s.value("file_label", std::string());
      e.payload_column = s.value("payload_column", std::string());
      e.class_column = s.value("class_column", std::string());

      if (e.format == SourceFormat::raw_http_blocks && e.file_label.empty()) {
        throw bad(e.name + ": raw_http_blocks needs file_label");
      }
      if (e.format == SourceFormat::payload_csv && (e.payload_column.empty() || e.class_column.empty())) {
        throw bad(e.name + ": payload_csv needs payload_column and class_column");
      }
      for (const auto& [from, to] : e.label_mapping) {
        LabeledRecord probe;
        try {
          apply_canonical_label(probe, to);
        } catch (const Error&) {
          throw bad(e.name + ": label_mapping target '" + to + "' is not canonical");
        }
      }
      if (e.format == SourceFormat::raw_http_blocks && !e.label_mapping.empty() &&
          !e.label_mapping.contains(e.file_label)) {
        throw bad(e.name + ": file_label '" + e.file_label + "' missing from label_mapping");
      }
      manifest.sources.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw bad(ex.what());
  }
  if (manifest.sources.empty()) throw bad("manifest lists no sources");
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::manifest_error, "cannot open manifest " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::manifest_error, "manifest is not valid JSON: " + path.string());
  return manifest_from_json(j, path.parent_path());
}

}  // namespace dlwaf::data
