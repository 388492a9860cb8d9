// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dlwaf::http {

struct QueryParam {
  std::string name;
  std::string value;  // raw, not decoded

  friend bool operator==(const QueryParam&, const QueryParam&) = default;
};

struct Header {
  std::string name;
  std::string value;

  friend bool operator==(const Header&, const Header&) = default;
};

struct HttpRequest {
  std::string method;
  std::string target;     // request-target exactly as received
  std::string version;    // e.g. "HTTP/1.1"
  std::string path;       // route, scheme and authority stripped
  std::string raw_query;  // text after '?', fragment removed
  std::vector<QueryParam> query;
  std::vector<Header> headers;  // in wire order
  std::string body;
  std::string line_ending = "\r\n";
  std::string raw;  // original text handed to parse_raw_request
  /// Header lines and head terminator exactly as received; empty for
  /// hand-built requests, which serialize as "Name: value" plus a blank line.
  std::vector<std::string> header_lines;
  std::optional<std::string> head_end;

  /// First header with a case-insensitively matching name.
  std::optional<std::string_view> header(std::string_view name) const;

  /// Request line, headers and body re-assembled with the detected line ending.
  std::string serialize() const;

  friend bool operator==(const HttpRequest&, const HttpRequest&) = default;
};

/// Parses a raw HTTP/1.x request. Throws Error(malformed_request).
///
/// The head ends at the first empty line; everything after it is the body.
/// A request without an empty line is accepted and has an empty body.
HttpRequest parse_raw_request(std::string_view text);

/// Splits on '&' then on the first '='; a pair without '=' gets an empty value.
/// Empty segments ("a=1&&b=2") are skipped.
std::vector<QueryParam> split_query(std::string_view raw_query);

bool iequals(std::string_view a, std::string_view b);

// Decoding -------------------------------------------------------------------

/// %XX decoding with case-insensitive hex; invalid escapes are kept verbatim.
std::string percent_decode(std::string_view s);

/// &lt; &gt; &amp; &quot; &#39; and numeric references (&#NN; / &#xHH;),
/// emitted as UTF-8. Unknown or invalid references are kept verbatim.
std::string decode_html_entities(std::string_view s);

/// One decoding pass: percent decoding followed by entity decoding.
std::string decode_once(std::string_view s);

struct DecodeResult {
  std::string text;
  int rounds = 0;
};

/// Repeats decode_once until a pass changes nothing or max_rounds passes ran.
/// rounds counts every pass, including the one that confirmed the fixpoint.
DecodeResult decode_fixpoint(std::string_view s, int max_rounds = 5);

// Inspection payload ---------------------------------------------------------

struct InspectionOptions {
  std::vector<std::string> header_allowlist{"Cookie", "User-Agent", "Referer"};
  int max_decode_rounds = 5;

  friend bool operator==(const InspectionOptions&, const InspectionOptions&) = default;
};

struct InspectionPayload {
  std::string text;
  int decode_rounds = 0;
};

/// Joins path, raw query, body and allowlisted header values with single
/// spaces (empty parts skipped) and fixpoint-decodes the result. '+' means
/// space only inside the query and body. Body bytes that are not printable
/// ASCII or tab/CR/LF become U+FFFD first.
InspectionPayload inspection_payload(const HttpRequest& req,
                                     const InspectionOptions& options = {});

/// Same decoding applied to a bare payload string (no request structure).
InspectionPayload inspection_payload(std::string_view payload,
                                     const InspectionOptions& options = {});

}  // namespace dlwaf::http
