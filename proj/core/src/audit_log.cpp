// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "dlwaf/error.hpp"
#include "dlwaf/proxy.hpp"

namespace dlwaf::proxy {

nlohmann::json to_json(const AuditRecord& r) {
  nlohmann::json j;
  j["timestamp"] = r.timestamp;
  j["request_id"] = r.request_id;
  j["client_address"] = r.client_address;
  j["method"] = r.method;
  j["path"] = r.path;
  j["action"] = std::string(to_string(r.action));
  j["l1_flag"] = r.l1_flag;
  j["l2_class"] = r.l2_class ? nlohmann::json(*r.l2_class) : nlohmann::json(nullptr);
  j["features"] = r.features ? features::to_json(*r.features) : nlohmann::json(nullptr);
  j["reason"] = r.reason;
  j["status"] = r.status;
  j["latency_us"] = r.latency_us;
  j["bundle_fingerprint"] = r.bundle_fingerprint;
  return j;
}

AuditLog::AuditLog(const std::filesystem::path& path) : out_(path, std::ios::app | std::ios::binary) {
  if (!out_) throw Error(ErrorCode::io_error, "cannot open audit log " + path.string());
  worker_ = std::thread([this] { run(); });
}

AuditLog::~AuditLog() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void AuditLog::append(const AuditRecord& record) {
  auto line = to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(line));
    ++enqueued_;
  }
  appended_.fetch_add(1);
  cv_.notify_one();
}

void AuditLog::flush() {
  std::unique_lock lock(mu_);
  const auto target = enqueued_;
  drained_.wait(lock, [&] { return written_ >= target; });
}

void AuditLog::run() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
    if (queue_.empty() && stopping_) break;
    std::deque<std::string> batch;
    batch.swap(queue_);
    lock.unlock();
    for (const auto& line : batch) out_ << line << '\n';
    out_.flush();
    lock.lock();
    written_ += batch.size();
    drained_.notify_all();
  }
}

}  // namespace dlwaf::proxy
