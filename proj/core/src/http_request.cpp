// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/http_request.hpp"

#include <algorithm>

#include "dlwaf/error.hpp"

namespace dlwaf::http {
namespace {

bool is_tchar(char c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
    return true;
  }
  constexpr std::string_view extra = "!#$%&'*+-.^_`|~";
  return extra.find(c) != std::string_view::npos;
}

std::string_view trim_ows(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::malformed_request, why);
}

// Strips "scheme://authority" from an absolute-form target.
std::string_view route_of(std::string_view target) {
  for (std::string_view scheme : {"http://", "https://"}) {
    if (target.size() >= scheme.size() && iequals(target.substr(0, scheme.size()), scheme)) {
      std::string_view rest = target.substr(scheme.size());
      std::size_t slash = rest.find_first_of("/?");
      if (slash == std::string_view::npos) return "/";
      return rest.substr(slash);
    }
  }
  return target;
}

}  // namespace

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; };
           return lower(x) == lower(y);
         });
}

std::optional<std::string_view> HttpRequest::header(std::string_view name) const {
  for (const auto& h : headers) {
    if (iequals(h.name, name)) return std::string_view(h.value);
  }
  return std::nullopt;
}

std::string HttpRequest::serialize() const {
  std::string out;
  out.reserve(raw.size() + 16);
  out += method;
  out += ' ';
  out += target;
  out += ' ';
  out += version;
  const bool verbatim = head_end.has_value() && header_lines.size() == headers.size();
  if (verbatim) {
    for (const auto& line : header_lines) {
      out += line_ending;
      out += line;
    }
    out += *head_end;
  } else {
    for (const auto& h : headers) {
      out += line_ending;
      out += h.name;
      out += ": ";
      out += h.value;
    }
    out += line_ending;
    out += line_ending;
  }
  out += body;
  return out;
}

std::vector<QueryParam> split_query(std::string_view raw_query) {
  std::vector<QueryParam> params;
  std::size_t pos = 0;
  while (pos <= raw_query.size()) {
    std::size_t amp = raw_query.find('&', pos);
    if (amp == std::string_view::npos) amp = raw_query.size();
    std::string_view pair = raw_query.substr(pos, amp - pos);
    if (!pair.empty()) {
      std::size_t eq = pair.find('=');
      if (eq == std::string_view::npos) {
        params.push_back({std::string(pair), std::string()});
      } else {
        params.push_back({std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1))});
      }
    }
    pos = amp + 1;
  }
  return params;
}

HttpRequest parse_raw_request(std::string_view text) {
  HttpRequest req;
  req.raw = std::string(text);

  std::size_t first_nl = text.find('\n');
  req.line_ending = (first_nl != std::string_view::npos && first_nl > 0 && text[first_nl - 1] == '\r')
                        ? "\r\n"
                        : "\n";

  // Split head and body at the first empty line.
  std::string_view head = text;
  std::string_view body;
  const std::string blank = req.line_ending + req.line_ending;
  std::size_t head_end = text.find(blank);
  req.head_end = "";
  if (head_end != std::string_view::npos) {
    head = text.substr(0, head_end);
    body = text.substr(head_end + blank.size());
    req.head_end = blank;
  } else if (text.size() >= req.line_ending.size() &&
             text.substr(text.size() - req.line_ending.size()) == req.line_ending) {
    head = text.substr(0, text.size() - req.line_ending.size());
    req.head_end = req.line_ending;
  }

  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= head.size()) {
    std::size_t end = head.find(req.line_ending, pos);
    if (end == std::string_view::npos) end = head.size();
    lines.push_back(head.substr(pos, end - pos));
    pos = end + req.line_ending.size();
  }
  if (lines.empty() || lines.front().empty()) malformed("missing request line");

  // Request line: METHOD SP target SP version. Extra spaces end up in the target.
  std::string_view request_line = lines.front();
  std::size_t sp1 = request_line.find(' ');
  std::size_t sp2 = request_line.rfind(' ');
  if (sp1 == std::string_view::npos || sp1 == sp2) {
    malformed("request line needs 3 space-separated parts");
  }
  std::string_view method = request_line.substr(0, sp1);
  std::string_view target = request_line.substr(sp1 + 1, sp2 - sp1 - 1);
  std::string_view version = request_line.substr(sp2 + 1);
  if (method.empty() || !std::all_of(method.begin(), method.end(), is_tchar)) {
    malformed("method is not a token");
  }
  if (target.empty()) malformed("empty request target");
  if (version.substr(0, 5) != "HTTP/") malformed("version must start with HTTP/");

  req.method = std::string(method);
  req.target = std::string(target);
  req.version = std::string(version);

  std::string_view route = route_of(target);
  if (std::size_t hash = route.find('#'); hash != std::string_view::npos) {
    route = route.substr(0, hash);
  }
  if (std::size_t q = route.find('?'); q != std::string_view::npos) {
    req.path = std::string(route.substr(0, q));
    req.raw_query = std::string(route.substr(q + 1));
  } else {
    req.path = std::string(route);
  }
  req.query = split_query(req.raw_query);

  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) {
      malformed("header line without name: '" + std::string(line.substr(0, 64)) + "'");
    }
    req.headers.push_back({std::string(line.substr(0, colon)),
                           std::string(trim_ows(line.substr(colon + 1)))});
    req.header_lines.emplace_back(line);
  }
  req.body = std::string(body);
  return req;
}

}  // namespace dlwaf::http
