// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cstdint>
#include <utility>

#include "dlwaf/http_request.hpp"

namespace dlwaf::http {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Parses "#NNN;" or "#xHH;" starting right after '&'. Returns consumed length or 0.
std::size_t numeric_reference(std::string_view s, std::uint32_t& cp) {
  if (s.size() < 3 || s[0] != '#') return 0;
  std::size_t i = 1;
  int base = 10;
  if (s[i] == 'x' || s[i] == 'X') {
    base = 16;
    ++i;
  }
  std::size_t digits_start = i;
  std::uint64_t value = 0;
  while (i < s.size() && i - digits_start < 8) {
    int d = hex_value(s[i]);
    if (d < 0 || d >= base) break;
    value = value * base + d;
    ++i;
  }
  if (i == digits_start || i >= s.size() || s[i] != ';') return 0;
  if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) return 0;
  cp = static_cast<std::uint32_t>(value);
  return i + 1;
}

constexpr std::array<std::pair<std::string_view, char>, 5> kNamedEntities{{
    {"lt;", '<'},
    {"gt;", '>'},
    {"amp;", '&'},
    {"quot;", '"'},
    {"#39;", '\''},
}};

}  // namespace

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex_value(s[i + 1]);
      int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

std::string decode_html_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    std::string_view rest = s.substr(i + 1);
    bool matched = false;
    for (const auto& [name, ch] : kNamedEntities) {
      if (rest.substr(0, name.size()) == name) {
        out += ch;
        i += name.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    std::uint32_t cp = 0;
    if (std::size_t used = numeric_reference(rest, cp); used > 0) {
      append_utf8(out, cp);
      i += used;
      continue;
    }
    out += '&';
  }
  return out;
}

std::string decode_once(std::string_view s) {
  return decode_html_entities(percent_decode(s));
}

DecodeResult decode_fixpoint(std::string_view s, int max_rounds) {
  DecodeResult result{std::string(s), 0};
  if (max_rounds < 1) max_rounds = 1;
  while (result.rounds < max_rounds) {
    std::string next = decode_once(result.text);
    ++result.rounds;
    if (next == result.text) break;
    result.text = std::move(next);
  }
  return result;
}

namespace {

std::string plus_to_space(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '+') c = ' ';
  }
  return out;
}

std::string sanitize_body(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  for (char c : body) {
    auto u = static_cast<unsigned char>(c);
    if ((u >= 0x20 && u <= 0x7E) || u == '\t' || u == '\r' || u == '\n') {
      out += c;
    } else {
      out += "\xEF\xBF\xBD";
    }
  }
  return out;
}

void append_part(std::string& joined, std::string_view part) {
  if (part.empty()) return;
  if (!joined.empty()) joined += ' ';
  joined += part;
}

}  // namespace

InspectionPayload inspection_payload(const HttpRequest& req, const InspectionOptions& options) {
  std::string joined;
  append_part(joined, req.path);
  append_part(joined, plus_to_space(req.raw_query));
  append_part(joined, plus_to_space(sanitize_body(req.body)));
  for (const auto& name : options.header_allowlist) {
    for (const auto& h : req.headers) {
      if (iequals(h.name, name)) append_part(joined, h.value);
    }
  }
  DecodeResult decoded = decode_fixpoint(joined, options.max_decode_rounds);
  return {std::move(decoded.text), decoded.rounds};
}

InspectionPayload inspection_payload(std::string_view payload, const InspectionOptions& options) {
  DecodeResult decoded = decode_fixpoint(plus_to_space(payload), options.max_decode_rounds);
  return {std::move(decoded.text), decoded.rounds};
}

}  // namespace dlwaf::http
