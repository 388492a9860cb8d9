// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "dlwaf/pipeline.hpp"

namespace dlwaf::proxy {

enum class FailMode { open, closed };

std::string_view to_string(FailMode mode);
FailMode fail_mode_from_string(std::string_view name);

struct ProxyConfig {
  std::string listen_host = "0.0.0.0";
  int listen_port = 8080;  // 0 picks a free port
  std::string upstream_url;  // http://host[:port]
  int block_status = 403;
  FailMode fail_mode = FailMode::closed;
  std::size_t max_body_bytes = 1 << 20;
  std::filesystem::path audit_log_path;  // empty disables the audit file
  std::filesystem::path bundle_path;
  int upstream_timeout_sec = 10;

  /// Throws Error(invalid_argument).
  void validate() const;
};

struct Upstream {
  std::string host;
  int port = 80;
};

/// Accepts http://host[:port] with an optional trailing '/'.
/// Throws Error(invalid_argument).
Upstream parse_upstream(std::string_view url);

struct AuditRecord {
  std::string timestamp;
  std::string request_id;
  std::string client_address;
  std::string method;
  std::string path;
  Action action = Action::allow;
  int l1_flag = 0;
  std::optional<std::string> l2_class;
  std::optional<features::L1FeatureVector> features;
  std::string reason;
  int status = 0;
  std::int64_t latency_us = 0;
  std::string bundle_fingerprint;
};

nlohmann::json to_json(const AuditRecord& record);

/// Append-only JSONL writer fed through a queue and drained by one thread.
class AuditLog {
 public:
  /// Throws Error(io_error) when the file cannot be opened for appending.
  explicit AuditLog(const std::filesystem::path& path);
  ~AuditLog();
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  void append(const AuditRecord& record);
  /// Blocks until every queued record is on disk.
  void flush();
  std::uint64_t appended() const noexcept { return appended_.load(); }

 private:
  void run();

  std::ofstream out_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable drained_;
  std::deque<std::string> queue_;
  std::uint64_t written_ = 0;
  std::uint64_t enqueued_ = 0;
  std::atomic<std::uint64_t> appended_{0};
  bool stopping_ = false;
  std::thread worker_;
};

struct ProxyStats {
  std::uint64_t handled = 0;
  std::uint64_t allowed = 0;
  std::uint64_t blocked = 0;
  std::uint64_t upstream_errors = 0;
};

/// Reverse proxy that classifies each request before forwarding it.
class Proxy {
 public:
  /// Loads config.bundle_path. Throws Error(bundle_load_error).
  explicit Proxy(ProxyConfig config);
  Proxy(ProxyConfig config, std::shared_ptr<const WafModelBundle> bundle);
  ~Proxy();
  Proxy(const Proxy&) = delete;
  Proxy& operator=(const Proxy&) = delete;

  /// Binds and starts the accept loop on a background thread.
  /// Throws Error(bind_error).
  void start();
  /// Stops accepting, drains in-flight requests and flushes the audit log.
  void stop();
  int port() const noexcept { return port_; }

  /// Swaps in the bundle at path (config.bundle_path when empty). On failure
  /// the current bundle stays active and the error is returned.
  std::optional<std::string> reload(const std::filesystem::path& path = {});

  std::shared_ptr<const WafModelBundle> bundle() const;
  ProxyStats stats() const;
  const ProxyConfig& config() const noexcept { return config_; }

 private:
  struct Impl;
  ProxyConfig config_;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace dlwaf::proxy
