// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/proxy.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "dlwaf/error.hpp"

namespace dlwaf::proxy {

std::string_view to_string(FailMode mode) { return mode == FailMode::open ? "open" : "closed"; }

FailMode fail_mode_from_string(std::string_view name) {
  if (name == "open") return FailMode::open;
  if (name == "closed") return FailMode::closed;
  throw Error(ErrorCode::invalid_argument, "fail mode must be open or closed, got " + std::string(name));
}

Upstream parse_upstream(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (url.substr(0, scheme.size()) != scheme) {
    throw Error(ErrorCode::invalid_argument, "upstream must start with http://: " + std::string(url));
  }
  auto rest = url.substr(scheme.size());
  if (!rest.empty() && rest.back() == '/') rest.remove_suffix(1);
  if (rest.empty() || rest.find('/') != std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "upstream must be http://host[:port]: " + std::string(url));
  }
  Upstream u;
  std::string_view host = rest;
  if (rest.front() == '[') {
    const auto close = rest.find(']');
    if (close == std::string_view::npos) throw Error(ErrorCode::invalid_argument, "bad IPv6 upstream host");
    host = rest.substr(1, close - 1);
    rest = rest.substr(close + 1);
    if (!rest.empty() && rest.front() != ':') throw Error(ErrorCode::invalid_argument, "bad upstream port");
  } else if (const auto colon = rest.rfind(':'); colon != std::string_view::npos) {
    host = rest.substr(0, colon);
    rest = rest.substr(colon);
  } else {
    rest = {};
  }
  if (!rest.empty()) {
    const auto digits = rest.substr(1);
    int port = 0;
    if (digits.empty() || digits.size() > 5) throw Error(ErrorCode::invalid_argument, "bad upstream port");
    for (char c : digits) {
      if (c < '0' || c > '9') throw Error(ErrorCode::invalid_argument, "bad upstream port");
      port = port * 10 + (c - '0');
    }
    if (port < 1 || port > 65535) throw Error(ErrorCode::invalid_argument, "upstream port out of range");
    u.port = port;
  }
  if (host.empty()) throw Error(ErrorCode::invalid_argument, "upstream host is empty");
  u.host = std::string(host);
  return u;
}

namespace {

bool is_loopback(std::string_view addr) {
  return addr == "localhost" || addr == "::1" || addr.rfind("127.", 0) == 0 || addr.rfind("::ffff:127.", 0) == 0;
}

bool is_hop_by_hop(const std::string& name) {
  static constexpr std::string_view kNames[] = {
      "Connection", "Keep-Alive", "Proxy-Authenticate", "Proxy-Authorization", "TE", "Trailer",
      "Transfer-Encoding", "Upgrade", "Proxy-Connection",
      // pseudo headers added by the server library and lengths recomputed on write
      "REMOTE_ADDR", "REMOTE_PORT", "LOCAL_ADDR", "LOCAL_PORT", "Content-Length"};
  for (auto n : kNames) {
    if (http::iequals(name, n)) return true;
  }
  return false;
}

// Names listed in the Connection header are hop-by-hop too.
bool listed_in_connection(const httplib::Headers& headers, const std::string& name) {
  for (auto [it, end] = headers.equal_range("Connection"); it != end; ++it) {
    std::string_view v = it->second;
    while (!v.empty()) {
      const auto comma = v.find(',');
      auto tok = v.substr(0, comma);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      if (http::iequals(tok, name)) return true;
      if (comma == std::string_view::npos) break;
      v.remove_prefix(comma + 1);
    }
  }
  return false;
}

std::string now_rfc3339() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto us =
      std::chrono::duration_cast<std::chrono::microseconds>(now.time_since_epoch()).count() % 1000000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%06lldZ", static_cast<long long>(us));
  return buf;
}

std::string raw_request_text(const httplib::Request& req) {
  std::string raw = req.method + " " + req.target + " " + req.version + "\r\n";
  for (const auto& [name, value] : req.headers) {
    if (name == "REMOTE_ADDR" || name == "REMOTE_PORT" || name == "LOCAL_ADDR" || name == "LOCAL_PORT") continue;
    raw += name + ": " + value + "\r\n";
  }
  raw += "\r\n";
  raw += req.body;
  return raw;
}

}  // namespace

void ProxyConfig::validate() const {
  if (listen_port < 0 || listen_port > 65535) throw Error(ErrorCode::invalid_argument, "listen port out of range");
  if (max_body_bytes == 0) throw Error(ErrorCode::invalid_argument, "max_body_bytes must be > 0");
  if (block_status < 400 || block_status > 599) {
    throw Error(ErrorCode::invalid_argument, "block status must be a 4xx or 5xx code");
  }
  const auto up = parse_upstream(upstream_url);
  if (is_loopback(up.host) && up.port == listen_port) {
    throw Error(ErrorCode::invalid_argument, "upstream is this proxy's own listen port");
  }
}

struct Proxy::Impl {
  httplib::Server server;
  std::thread thread;
  mutable std::mutex bundle_mu;
  std::shared_ptr<const WafModelBundle> bundle;
  std::unique_ptr<AuditLog> audit;
  Upstream upstream;
  std::string id_prefix;
  std::atomic<std::uint64_t> next_id{0};
  std::atomic<std::uint64_t> handled{0};
  std::atomic<std::uint64_t> allowed{0};
  std::atomic<std::uint64_t> blocked{0};
  std::atomic<std::uint64_t> upstream_errors{0};
  bool running = false;

  std::shared_ptr<const WafModelBundle> current() const {
    std::lock_guard lock(bundle_mu);
    return bundle;
  }

  std::string new_request_id() {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s-%08llx", id_prefix.c_str(),
                  static_cast<unsigned long long>(next_id.fetch_add(1) + 1));
    return buf;
  }

  void record(AuditRecord& r) {
    ++handled;
    (r.action == Action::block ? blocked : allowed)++;
    if (audit) audit->append(r);
  }
};

namespace {

std::shared_ptr<const WafModelBundle> load_for_serving(const std::filesystem::path& path) {
  try {
    return std::make_shared<const WafModelBundle>(load_bundle(path));
  } catch (const Error& e) {
    throw Error(ErrorCode::bundle_load_error, path.string() + ": " + e.what());
  }
}

void set_block_response(httplib::Response& res, int status, const std::string& cls, const std::string& id) {
  res.status = status;
  nlohmann::json body{{"blocked", true}, {"class", cls}, {"request_id", id}};
  res.set_content(body.dump(), "application/json");
  res.set_header("X-Request-Id", id);
}

}  // namespace

Proxy::Proxy(ProxyConfig config) : Proxy(config, load_for_serving(config.bundle_path)) {}

Proxy::Proxy(ProxyConfig config, std::shared_ptr<const WafModelBundle> bundle)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  config_.validate();
  if (!bundle) throw Error(ErrorCode::bundle_load_error, "no bundle");
  impl_->bundle = std::move(bundle);
  impl_->upstream = parse_upstream(config_.upstream_url);
  if (!config_.audit_log_path.empty()) impl_->audit = std::make_unique<AuditLog>(config_.audit_log_path);
  {
    char buf[16];
    const auto t = std::chrono::system_clock::now().time_since_epoch();
    std::snprintf(buf, sizeof buf, "%08llx",
                  static_cast<unsigned long long>(std::chrono::duration_cast<std::chrono::seconds>(t).count()));
    impl_->id_prefix = buf;
  }

  auto& srv = impl_->server;
  Impl* impl = impl_.get();
  const ProxyConfig* cfg = &config_;

  // Bodies above the cap are refused by the server library with 413 before a
  // handler runs; in open mode the cap is raised so they can be forwarded.
  constexpr std::size_t kOpenModeCap = std::size_t{64} << 20;
  srv.set_payload_max_length(config_.fail_mode == FailMode::closed ? config_.max_body_bytes
                                                                   : std::max(config_.max_body_bytes, kOpenModeCap));

  srv.set_pre_routing_handler([this, impl](const httplib::Request& req, httplib::Response& res) {
    if (req.path != "/-/reload" || req.method != "POST" || !is_loopback(req.remote_addr)) {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    if (auto err = reload()) {
      res.status = 500;
      res.set_content(nlohmann::json{{"reloaded", false}, {"error", *err}}.dump(), "application/json");
    } else {
      res.status = 200;
      res.set_content(nlohmann::json{{"reloaded", true}, {"fingerprint", impl->current()->training_fingerprint}}.dump(),
                      "application/json");
    }
    return httplib::Server::HandlerResponse::Handled;
  });

  srv.set_error_handler([impl, cfg](const httplib::Request& req, httplib::Response& res) {
    if (res.status != 413) return httplib::Server::HandlerResponse::Unhandled;
    AuditRecord r;
    r.timestamp = now_rfc3339();
    r.request_id = impl->new_request_id();
    r.client_address = req.remote_addr;
    r.method = req.method;
    r.path = req.path;
    r.action = Action::block;
    r.l2_class = "oversize";
    r.reason = "body exceeds max_body_bytes";
    r.status = cfg->block_status;
    r.bundle_fingerprint = impl->current()->training_fingerprint;
    set_block_response(res, cfg->block_status, "oversize", r.request_id);
    impl->record(r);
    return httplib::Server::HandlerResponse::Handled;
  });

  auto handler = [impl, cfg](const httplib::Request& req, httplib::Response& res) {
    const auto bundle = impl->current();
    AuditRecord r;
    r.timestamp = now_rfc3339();
    r.request_id = impl->new_request_id();
    r.client_address = req.remote_addr;
    r.method = req.method;
    r.path = req.path;
    r.bundle_fingerprint = bundle->training_fingerprint;

    bool forward = true;
    const auto t0 = std::chrono::steady_clock::now();
    if (req.body.size() > cfg->max_body_bytes) {
      // only reachable in open mode
      r.reason = "oversize, forwarded uninspected";
    } else {
      try {
        const auto parsed = http::parse_raw_request(raw_request_text(req));
        const Verdict v = classify(*bundle, parsed);
        r.action = v.action;
        r.l1_flag = v.l1_flag;
        r.l2_class = v.l2_class;
        r.features = v.features;
        r.reason = v.reason;
        forward = v.action == Action::allow;
      } catch (const std::exception& e) {
        spdlog::error("{} inspection failed: {}", r.request_id, e.what());
        if (cfg->fail_mode == FailMode::closed) {
          r.action = Action::block;
          r.l2_class = "inspection_error";
          forward = false;
        }
        r.reason = std::string("inspection error: ") + e.what();
      }
    }
    r.latency_us =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0).count();

    if (!forward) {
      set_block_response(res, cfg->block_status, r.l2_class.value_or("unknown"), r.request_id);
      r.status = res.status;
      impl->record(r);
      return;
    }

    httplib::Client client(impl->upstream.host, impl->upstream.port);
    client.set_url_encode(false);
    client.set_connection_timeout(cfg->upstream_timeout_sec, 0);
    client.set_read_timeout(cfg->upstream_timeout_sec, 0);
    client.set_write_timeout(cfg->upstream_timeout_sec, 0);
    client.set_keep_alive(false);

    httplib::Request out;
    out.method = req.method;
    out.path = req.target;
    for (const auto& [name, value] : req.headers) {
      if (is_hop_by_hop(name) || listed_in_connection(req.headers, name) || http::iequals(name, "X-Forwarded-For")) {
        continue;
      }
      out.headers.emplace(name, value);
    }
    std::string xff = req.get_header_value("X-Forwarded-For");
    xff = xff.empty() ? req.remote_addr : xff + ", " + req.remote_addr;
    out.headers.emplace("X-Forwarded-For", xff);
    out.body = req.body;
    if (!req.body.empty() && !out.has_header("Content-Type")) out.headers.emplace("Content-Type", "application/octet-stream");

    auto result = client.send(out);
    if (!result) {
      ++impl->upstream_errors;
      spdlog::warn("{} upstream unreachable: {}", r.request_id, httplib::to_string(result.error()));
      res.status = 502;
      res.set_content(nlohmann::json{{"error", "upstream unreachable"}, {"request_id", r.request_id}}.dump(),
                      "application/json");
    } else {
      res.status = result->status;
      for (const auto& [name, value] : result->headers) {
        if (is_hop_by_hop(name) || listed_in_connection(result->headers, name)) continue;
        res.headers.emplace(name, value);
      }
      res.body = std::move(result->body);
    }
    res.set_header("X-Request-Id", r.request_id);
    r.status = res.status;
    impl->record(r);
  };

  const std::string any = "[\\s\\S]*";
  srv.Get(any, handler);
  srv.Post(any, handler);
  srv.Put(any, handler);
  srv.Patch(any, handler);
  srv.Delete(any, handler);
  srv.Options(any, handler);
}

Proxy::~Proxy() { stop(); }

void Proxy::start() {
  if (impl_->running) return;
  auto& srv = impl_->server;
  // httplib's default also sets SO_REUSEPORT, which lets a second process share a busy port.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  if (config_.listen_port == 0) {
    port_ = srv.bind_to_any_port(config_.listen_host);
    if (port_ < 0) throw Error(ErrorCode::bind_error, "cannot bind " + config_.listen_host);
  } else {
    if (!srv.bind_to_port(config_.listen_host, config_.listen_port)) {
      throw Error(ErrorCode::bind_error,
                  "cannot bind " + config_.listen_host + ":" + std::to_string(config_.listen_port));
    }
    port_ = config_.listen_port;
  }
  impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  impl_->running = true;
  spdlog::info("listening on {}:{}, upstream {}, fail mode {}", config_.listen_host, port_, config_.upstream_url,
               to_string(config_.fail_mode));
}

void Proxy::stop() {
  if (!impl_) return;
  if (impl_->running) {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
    impl_->running = false;
    spdlog::info("stopped after {} requests", impl_->handled.load());
  }
  if (impl_->audit) impl_->audit->flush();
}

std::optional<std::string> Proxy::reload(const std::filesystem::path& path) {
  const auto& target = path.empty() ? config_.bundle_path : path;
  try {
    auto fresh = std::make_shared<const WafModelBundle>(load_bundle(target));
    const auto fp = fresh->training_fingerprint;
    {
      std::lock_guard lock(impl_->bundle_mu);
      impl_->bundle = std::move(fresh);
    }
    spdlog::info("reloaded bundle {} (fingerprint {})", target.string(), fp);
    return std::nullopt;
  } catch (const std::exception& e) {
    spdlog::error("reload of {} failed, keeping current bundle: {}", target.string(), e.what());
    return std::string(e.what());
  }
}

std::shared_ptr<const WafModelBundle> Proxy::bundle() const { return impl_->current(); }

ProxyStats Proxy::stats() const {
  return {impl_->handled.load(), impl_->allowed.load(), impl_->blocked.load(), impl_->upstream_errors.load()};
}

}  // namespace dlwaf::proxy
