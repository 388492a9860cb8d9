// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>
#include <fcntl.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dlwaf/error.hpp"
#include "dlwaf/eval.hpp"
#include "dlwaf/pipeline.hpp"
#include "dlwaf/svm.hpp"
#include "dlwaf/synthetic.hpp"
#include "dlwaf/training.hpp"
#include "stub_upstream.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using dlwaf::Rng;
using dlwaf::testing::ProcessResult;
using dlwaf::testing::read_file;
using dlwaf::testing::run_process;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects failed checks; the first few are reported.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) {
      if (!notes_.empty()) notes_ += "; ";
      notes_ += what;
    }
  }
  void note(const std::string& s) {
    if (!info_.empty()) info_ += ", ";
    info_ += s;
  }
  Outcome outcome() const {
    Outcome o;
    o.pass = failures_ == 0;
    o.detail = o.pass ? info_ : std::to_string(failures_) + " failed check(s): " + notes_ + (info_.empty() ? "" : " | " + info_);
    return o;
  }

 private:
  int failures_ = 0;
  std::string notes_;
  std::string info_;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Env {
  std::string cli;
  fs::path work;

  ProcessResult dlwaf(std::vector<std::string> args) const {
    args.insert(args.begin(), cli);
    return run_process(args);
  }

  fs::path corpus() const { return work / "corpus-seed42.jsonl"; }
  fs::path bundle() const { return work / "seed42.wafmodel.json"; }
};

/// Generates the seed-42 mini-corpus and trains the reference bundle once.
bool prepare(const Env& env, nlohmann::json& train_report, double& train_seconds, std::string& error) {
  auto g = env.dlwaf({"--seed", "42", "gen-corpus", "--out", env.corpus().string(), "--size", "2000"});
  if (g.exit_code != 0) {
    error = "gen-corpus failed: " + g.err;
    return false;
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto t = env.dlwaf({"--seed", "42", "train", "--l1-data", env.corpus().string(), "--out", env.bundle().string(),
                      "--split", "0.8", "--kfold", "10", "--ngram", "1,4", "--kernel", "rbf", "--c", "10", "--report",
                      "json"});
  train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (t.exit_code != 0) {
    error = "train failed: " + t.err;
    return false;
  }
  try {
    train_report = nlohmann::json::parse(t.out);
  } catch (const std::exception& e) {
    error = std::string("train report is not JSON: ") + e.what();
    return false;
  }
  return true;
}

// AC1 ------------------------------------------------------------------------------------
Outcome ac1_metrics() {
  using namespace dlwaf::eval;
  Check c;
  const ConfusionCounts counts{22625, 0, 7835, 51};
  const double acc = accuracy(counts);
  const double prec = precision(counts);
  const double rec = recall(counts);
  c.expect(std::abs(acc - 0.99833) <= 1e-5, "accuracy " + fmt(acc, 6));
  c.expect(prec == 1.0, "precision " + fmt(prec, 6));
  c.expect(std::abs(rec - 22625.0 / 22676.0) <= 1e-9, "recall " + fmt(rec, 9));
  c.note("accuracy=" + fmt(acc, 5) + " precision=" + fmt(prec, 1) + " recall=" + fmt(rec, 6));
  return c.outcome();
}

// AC2 ------------------------------------------------------------------------------------
Outcome ac2_decision_logic(const dlwaf::WafModelBundle& bundle) {
  using dlwaf::Action;
  Check c;
  int legal = 0, rejected = 0;
  for (int l1 : {-1, 0, 1, 2}) {
    for (std::optional<int> l2 : {std::optional<int>{}, std::optional<int>{-1}, std::optional<int>{0},
                                  std::optional<int>{1}, std::optional<int>{2}}) {
      const bool is_legal = (l1 == 0 && !l2) || (l1 == 1 && l2 && (*l2 == 0 || *l2 == 1));
      try {
        const Action a = dlwaf::decision_rule(l1, l2);
        c.expect(is_legal, "accepted illegal input");
        const Action want = (l1 == 1 && l2 == 1) ? Action::block : Action::allow;
        c.expect(a == want, "wrong action for (" + std::to_string(l1) + "," + (l2 ? std::to_string(*l2) : "-") + ")");
        ++legal;
      } catch (const dlwaf::Error& e) {
        c.expect(!is_legal && e.code() == dlwaf::ErrorCode::contract_violation, "rejected a legal input");
        ++rejected;
      }
    }
  }
  c.expect(legal == 3, "expected 3 legal combinations, saw " + std::to_string(legal));

  // Gating: Layer 2 runs exactly when Layer 1 flags the request.
  std::size_t layer2_calls = 0, flagged = 0, n = 0;
  for (const auto& rec : dlwaf::data::generate_synthetic_corpus(1000, 2024)) {
    const auto text = dlwaf::http::inspection_payload(*rec.raw_request, bundle.inspection).text;
    const auto fv = dlwaf::features::extract_features(text, bundle.lexicon);
    const int l1 = bundle.l1.predict(fv);
    const std::size_t before = layer2_calls;
    const auto v = dlwaf::decide(fv, l1, [&] {
      ++layer2_calls;
      return dlwaf::layer2_class(bundle, text);
    });
    flagged += static_cast<std::size_t>(l1);
    ++n;
    c.expect((layer2_calls - before) == static_cast<std::size_t>(l1), "layer 2 call count mismatch");
    c.expect(v == dlwaf::classify(bundle, *rec.raw_request), "instrumented verdict differs from classify");
    c.expect(v.l2_class.has_value() == (l1 == 1), "l2_class presence mismatch");
  }
  c.expect(layer2_calls == flagged, "layer 2 evaluated on unflagged traffic");
  c.note("truth table 3 legal/" + std::to_string(rejected) + " rejected; " + std::to_string(n) +
         " requests, layer-2 calls=" + std::to_string(layer2_calls) + "=flagged");
  return c.outcome();
}

// AC3 ------------------------------------------------------------------------------------
Outcome ac3_fp_containment(const Env& env) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  int strict = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto train_set = dlwaf::data::generate_synthetic_corpus(150, 1000 + i);
    const auto test_set = dlwaf::data::generate_synthetic_corpus(150, 5000 + i);
    dlwaf::training::TrainConfig cfg;
    cfg.seed = i;
    cfg.tree.max_depth = 1 + static_cast<int>(i % 6);
    const auto trained = dlwaf::training::train(train_set, train_set, cfg);
    const auto rep = dlwaf::evaluate_bundle(trained.bundle, test_set);
    c.expect(rep.combined.confusion.fp <= rep.layer1_only.confusion.fp,
             "corpus " + std::to_string(i) + ": combined FP " + std::to_string(rep.combined.confusion.fp) +
                 " > layer-1 FP " + std::to_string(rep.layer1_only.confusion.fp));
    strict += rep.combined.confusion.fp < rep.layer1_only.confusion.fp;
  }

  const auto bundle = env.work / "noisy.wafmodel.json";
  auto t = env.dlwaf({"--seed", "42", "train", "--l1-data", env.corpus().string(), "--out", bundle.string(),
                      "--max-depth", "3"});
  c.expect(t.exit_code == 0, "noisy train failed: " + t.err);
  auto e = env.dlwaf({"eval", "--bundle", bundle.string(), "--data", env.corpus().string(), "--report", "json"});
  c.expect(e.exit_code == 0, "eval failed: " + e.err);
  std::size_t l1_fp = 0, combined_fp = 0;
  if (e.exit_code == 0) {
    const auto j = nlohmann::json::parse(e.out);
    l1_fp = j["layer1_only"]["confusion"]["fp"].get<std::size_t>();
    combined_fp = j["combined"]["confusion"]["fp"].get<std::size_t>();
    c.expect(combined_fp + 1 <= l1_fp, "desk-scale combined FP " + std::to_string(combined_fp) +
                                           " not below layer-1 FP " + std::to_string(l1_fp));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 60.0, "runtime " + fmt(secs, 1) + "s exceeds 60s");
  c.note("50/50 corpora FP-contained (" + std::to_string(strict) + " strictly lower); max_depth=3 on 2000: L1 FP=" +
         std::to_string(l1_fp) + " combined FP=" + std::to_string(combined_fp) + "; " + fmt(secs, 1) + "s");
  return c.outcome();
}

// AC4 ------------------------------------------------------------------------------------
Outcome ac4_accuracy(const nlohmann::json& report, double seconds) {
  Check c;
  const double holdout = report["layer1"]["holdout"]["accuracy"].get<double>();
  const double cv = report["layer1"]["cv"]["mean_accuracy"].get<double>();
  c.expect(holdout >= 0.95, "L1 holdout " + fmt(holdout));
  c.expect(cv >= 0.95, "L1 10-fold CV " + fmt(cv));
  c.expect(report["layer1"]["cv"]["folds"].size() == 10, "expected 10 folds");
  std::string per_class;
  const auto& holdout2 = report["layer2"]["holdout_per_class"];
  for (const char* cls : {"valid", "sqli", "xss", "path_traversal", "command_injection"}) {
    if (!holdout2.contains(cls)) {
      c.expect(false, std::string("missing class ") + cls);
      continue;
    }
    const double r = holdout2[cls]["recall"].get<double>();
    c.expect(r >= 0.90, std::string(cls) + " recall " + fmt(r));
    per_class += std::string(per_class.empty() ? "" : " ") + cls + "=" + fmt(r, 3);
  }
  c.expect(seconds < 300.0, "runtime " + fmt(seconds, 1) + "s");
  c.note("L1 holdout=" + fmt(holdout) + " cv10=" + fmt(cv) + "; L2 recall " + per_class + "; " + fmt(seconds, 1) + "s");
  return c.outcome();
}

// AC5 ------------------------------------------------------------------------------------
Outcome ac5_feature_oracle() {
  Check c;
  const auto& lex = dlwaf::features::default_lexicon();
  Rng rng(555);
  std::size_t nonempty = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::string p = dlwaf::testing::random_payload(rng, 120);
    const auto fv = dlwaf::features::extract_features(p, lex);
    const auto o = dlwaf::testing::oracle_features(p, lex.badwords(), lex.illegal_chars());
    const double diff = std::max({std::abs(fv.alnum_ratio - o.alnum), std::abs(fv.badword_ratio - o.badword),
                                  std::abs(fv.special_ratio - o.special),
                                  std::abs(fv.illegal_special_ratio - o.illegal)});
    worst = std::max(worst, diff);
    c.expect(diff <= 1e-9, "oracle mismatch on payload #" + std::to_string(i));
    if (!p.empty()) {
      ++nonempty;
      c.expect(std::abs(fv.alnum_ratio + fv.special_ratio - 100.0) <= 1e-9, "complement broken #" + std::to_string(i));
    }
  }
  c.note("10000 payloads (" + std::to_string(nonempty) + " non-empty), max |diff|=" + fmt(worst, 12));
  return c.outcome();
}

// AC6 ------------------------------------------------------------------------------------
Outcome ac6_tfidf_oracle() {
  Check c;
  Rng rng(666);
  double worst = 0.0;
  std::size_t components = 0;
  int corpora = 0;
  while (corpora < 100) {
    std::vector<std::string> corpus;
    const std::size_t docs = 1 + rng.below(10);
    for (std::size_t d = 0; d < docs; ++d) {
      corpus.push_back(dlwaf::testing::random_small_alphabet(rng, 20, "abcAB '<=1"));
    }
    dlwaf::tfidf::NgramConfig cfg;
    cfg.min_n = 1 + static_cast<int>(rng.below(2));
    cfg.max_n = cfg.min_n + static_cast<int>(rng.below(4));
    std::size_t longest = 0;
    for (const auto& d : corpus) longest = std::max(longest, d.size());
    if (longest < static_cast<std::size_t>(cfg.min_n)) continue;  // nothing to fit
    ++corpora;
    const auto vocab = dlwaf::tfidf::fit_vocabulary(corpus, cfg);
    const auto oracle = dlwaf::testing::oracle_fit(corpus, cfg.min_n, cfg.max_n, cfg.lowercase);
    c.expect(vocab.size() == oracle.idf.size(), "vocabulary size mismatch");
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      auto it = oracle.idf.find(vocab.tokens()[i]);
      c.expect(it != oracle.idf.end() && std::abs(it->second - vocab.idf()[i]) <= 1e-9, "idf mismatch");
    }
    std::vector<std::string> probes = corpus;
    probes.push_back(dlwaf::testing::random_small_alphabet(rng, 20, "abcAB '<=1z"));
    for (const auto& text : probes) {
      const auto got = vocab.transform(text);
      const auto want = oracle.transform(text, cfg.min_n, cfg.max_n, cfg.lowercase);
      c.expect(got.nnz() == want.size(), "non-zero count mismatch");
      for (const auto& e : got.entries) {
        auto it = want.find(vocab.tokens()[e.index]);
        const double diff = it == want.end() ? std::abs(e.weight) : std::abs(it->second - e.weight);
        worst = std::max(worst, diff);
        c.expect(diff <= 1e-9, "weight mismatch");
        ++components;
      }
    }
  }
  c.note("100 corpora, " + std::to_string(components) + " components, max |diff|=" + fmt(worst, 12));
  return c.outcome();
}

// AC7 ------------------------------------------------------------------------------------
dlwaf::SparseVector dense(std::initializer_list<double> xs) {
  dlwaf::SparseVector v;
  std::uint32_t i = 0;
  for (double x : xs) {
    if (x != 0.0) v.entries.push_back({i, x});
    ++i;
  }
  return v;
}

Outcome ac7_svm() {
  using namespace dlwaf::svm;
  Check c;
  const KernelSpec linear{KernelKind::linear, 1.0};

  // (a) analytic 1-D case
  std::vector<dlwaf::SparseVector> xs{dense({-1}), dense({1})};
  std::vector<int> ys{-1, 1};
  SvmTrainConfig cfg;
  cfg.C = 10;
  const auto m = fit_binary(xs, ys, linear, cfg);
  // boundary x0 solves w*x0 + b = 0 with w = f(1) - f(0)
  const double b = m.decision_value(dlwaf::SparseVector{});
  const double w = m.decision_value(dense({1})) - b;
  const double boundary = -b / w;
  c.expect(std::abs(boundary) <= 1e-3, "(a) boundary at " + fmt(boundary, 6));

  // (b) dual constraints and (c) KKT on 20 separable datasets
  Rng rng(777);
  double worst_balance = 0.0, worst_kkt = 1.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<dlwaf::SparseVector> px;
    std::vector<int> py;
    const int n = 20 + static_cast<int>(rng.below(21));
    for (int i = 0; i < n; ++i) {
      const int y = i % 2 ? 1 : -1;
      px.push_back(dense({y * 1.5 + rng.uniform() - 0.5, y * 1.0 + rng.uniform() - 0.5, rng.uniform()}));
      py.push_back(y);
    }
    SvmTrainConfig tc;
    tc.seed = static_cast<std::uint64_t>(t);
    const auto r = train_binary(px, py, linear, tc);
    double balance = 0.0;
    bool box = true;
    for (std::size_t i = 0; i < r.alphas.size(); ++i) {
      balance += r.alphas[i] * py[i];
      box = box && r.alphas[i] >= 0.0 && r.alphas[i] <= tc.C;
    }
    worst_balance = std::max(worst_balance, std::abs(balance));
    c.expect(box, "(b) alpha outside [0, C]");
    c.expect(std::abs(balance) <= 1e-6, "(b) sum alpha*y = " + fmt(balance, 9));
    int ok = 0;
    for (std::size_t i = 0; i < px.size(); ++i) {
      const double margin = py[i] * r.model.decision_value(px[i]);
      const double a = r.alphas[i];
      if (a <= 1e-12) {
        ok += margin >= 1 - tc.tol;
      } else if (a >= tc.C - 1e-12) {
        ok += margin <= 1 + tc.tol;
      } else {
        ok += std::abs(margin - 1) <= tc.tol;
      }
    }
    const double share = static_cast<double>(ok) / static_cast<double>(px.size());
    worst_kkt = std::min(worst_kkt, share);
    c.expect(share >= 0.95, "(c) KKT share " + fmt(share, 3));
  }

  // (d) rbf on 2-D blobs
  std::vector<dlwaf::SparseVector> bx;
  std::vector<int> by;
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2 ? 1 : -1;
    bx.push_back(dense({y * 2.0 + rng.uniform() - 0.5, y * 2.0 + rng.uniform() - 0.5}));
    by.push_back(y);
  }
  const auto blob = fit_binary(bx, by, KernelSpec{KernelKind::rbf, 0.5}, {});
  int correct = 0;
  for (std::size_t i = 0; i < bx.size(); ++i) correct += (blob.decision_value(bx[i]) > 0) == (by[i] > 0);
  c.expect(correct == 40, "(d) rbf training accuracy " + std::to_string(correct) + "/40");

  c.note("(a) boundary=" + fmt(boundary, 6) + " (b) max|sum ay|=" + fmt(worst_balance, 9) + " (c) min KKT share=" +
         fmt(worst_kkt, 3) + " (d) " + std::to_string(correct) + "/40");
  return c.outcome();
}

// AC8 ------------------------------------------------------------------------------------
bool wait_for_port(int port, std::chrono::seconds limit) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    const int fd = socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    const bool ok = connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
    close(fd);
    if (ok) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  return false;
}

pid_t spawn(const std::vector<std::string>& argv, const fs::path& log) {
  const pid_t pid = fork();
  if (pid == 0) {
    const int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    dup2(fd, 1);
    dup2(fd, 2);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execv(args[0], args.data());
    _exit(127);
  }
  return pid;
}

Outcome ac8_proxy(const Env& env) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  dlwaf::testing::StubUpstream upstream;
  const int port = dlwaf::testing::free_port();
  const auto audit = env.work / "audit.jsonl";
  fs::remove(audit);
  const pid_t pid = spawn({env.cli, "--log-level", "warn", "serve", "--bundle", env.bundle().string(), "--host",
                           "127.0.0.1", "--listen", std::to_string(port), "--upstream", upstream.url(), "--audit-log",
                           audit.string()},
                          env.work / "serve.log");
  if (!wait_for_port(port, std::chrono::seconds(30))) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    c.expect(false, "proxy did not start: " + read_file(env.work / "serve.log"));
    return c.outcome();
  }

  httplib::Client cli("127.0.0.1", port);
  const httplib::Headers browser{{"User-Agent", "Mozilla/5.0 (X11; Linux x86_64) Firefox/118.0"}};
  struct Scenario {
    std::string name, target, action;
  };
  const std::vector<Scenario> scenarios{
      {"correct name", "/register?first=John&last=Smith", "allow"},
      {"stray '&' typo", "/register?first=J%26o%26%26hn%3F%26&last=Smith", "allow"},
      {"sql injection", "/register?id=1%27+OR+%271%27%3D%271", "block"},
      {"union select", "/products?id=1+UNION+SELECT+username,password+FROM+users--", "block"}};
  int expected_hits = 0;
  std::string summary;
  for (const auto& s : scenarios) {
    const int before = upstream.hits;
    auto res = cli.Get(s.target, browser);
    if (!res) {
      c.expect(false, s.name + ": no response");
      continue;
    }
    const bool allowed = res->status == 200 && res->body == "ok";
    const bool blocked = res->status == 403;
    c.expect(s.action == "allow" ? allowed : blocked, s.name + ": status " + std::to_string(res->status));
    if (s.action == "allow") ++expected_hits;
    c.expect(upstream.hits == before + (s.action == "allow" ? 1 : 0), s.name + ": upstream count");
    if (blocked) {
      const auto body = nlohmann::json::parse(res->body, nullptr, false);
      c.expect(body.is_object() && body["blocked"] == true && body["class"] == "sqli", s.name + ": block body");
    }
    summary += (summary.empty() ? "" : "/") + std::string(allowed ? "allow" : blocked ? "block" : "?");
  }

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  c.expect(WIFEXITED(status) && WEXITSTATUS(status) == 0, "serve did not exit cleanly on SIGTERM");
  c.expect(upstream.hits == expected_hits, "upstream saw " + std::to_string(upstream.hits.load()) + " requests");

  std::vector<nlohmann::json> lines;
  std::ifstream in(audit);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
  }
  c.expect(lines.size() == scenarios.size(), "audit records " + std::to_string(lines.size()));
  if (lines.size() == scenarios.size()) {
    c.expect(lines[0]["l1_flag"] == 0, "scenario 1 should not be flagged by layer 1");
    c.expect(lines[1]["l1_flag"] == 1 && lines[1]["l2_class"] == "valid", "scenario 2 should be flagged then cleared");
    c.expect(lines[2]["l2_class"] == "sqli", "scenario 3 class");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 60.0, "runtime " + fmt(secs, 1) + "s");
  c.note(summary + "; upstream hits=" + std::to_string(upstream.hits.load()) + "; audit records=" +
         std::to_string(lines.size()) + "; " + fmt(secs, 1) + "s");
  return c.outcome();
}

// AC9 ------------------------------------------------------------------------------------
Outcome ac9_reproducibility(const Env& env) {
  Check c;
  std::vector<std::string> files[2];
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = env.work / ("repro" + std::to_string(run));
    fs::create_directories(dir);
    const auto corpus = dir / "c.jsonl";
    const auto bundle = dir / "m.wafmodel.json";
    auto g = env.dlwaf({"--seed", "42", "gen-corpus", "--out", corpus.string(), "--size", "600"});
    auto t = env.dlwaf({"--seed", "42", "train", "--l1-data", corpus.string(), "--out", bundle.string(), "--kfold",
                        "5", "--report", "json", "--report-out", (dir / "train.json").string()});
    auto tt = env.dlwaf({"--seed", "42", "train", "--l1-data", corpus.string(), "--out",
                         (dir / "m2.wafmodel.json").string(), "--report", "table"});
    auto e = env.dlwaf({"--seed", "42", "eval", "--bundle", bundle.string(), "--data", corpus.string(), "--report",
                        "json", "--out", (dir / "eval.json").string()});
    auto et = env.dlwaf({"--seed", "42", "eval", "--bundle", bundle.string(), "--data", env.corpus().string()});
    auto gr = env.dlwaf({"--seed", "42", "grid", "--data", corpus.string(), "--report", "json"});
    for (const auto* r : {&g, &t, &tt, &e, &et, &gr}) c.expect(r->exit_code == 0, "command failed: " + r->err);
    for (const char* f : {"c.jsonl", "m.wafmodel.json", "m2.wafmodel.json", "train.json", "eval.json"}) {
      files[run].push_back(read_file(dir / f));
    }
    outputs[run] = tt.out + "\n--\n" + et.out + "\n--\n" + gr.out;
  }
  const char* names[] = {"corpus", "bundle", "bundle(table run)", "train report", "eval report"};
  for (std::size_t i = 0; i < files[0].size(); ++i) c.expect(files[0][i] == files[1][i], std::string(names[i]) + " differs");
  c.expect(outputs[0] == outputs[1], "stdout reports differ");
  c.note("corpus, 2 bundles, train/eval/grid reports byte-identical across reruns (" +
         std::to_string(files[0][1].size()) + "-byte bundle)");
  return c.outcome();
}

// AC10 -----------------------------------------------------------------------------------
Outcome ac10_round_trips(const Env& env) {
  Check c;
  const auto original = dlwaf::load_bundle(env.bundle());
  const auto copy_path = env.work / "roundtrip.wafmodel.json";
  dlwaf::save_bundle(original, copy_path);
  const auto copy = dlwaf::load_bundle(copy_path);

  Rng rng(1010);
  std::vector<dlwaf::http::HttpRequest> requests;
  for (const auto& r : dlwaf::data::generate_synthetic_corpus(700, 31337)) requests.push_back(*r.raw_request);
  while (requests.size() < 1000) {
    const std::string raw = "GET /x?q=" + dlwaf::testing::random_small_alphabet(rng, 40, "abc%27<>;|&=+ \"()") +
                            " HTTP/1.1\r\nHost: h\r\nCookie: s=" + dlwaf::testing::random_small_alphabet(rng, 8, "ab'1") +
                            "\r\n\r\n";
    try {
      requests.push_back(dlwaf::http::parse_raw_request(raw));
    } catch (const dlwaf::Error&) {
    }
  }
  std::size_t same = 0, blocks = 0;
  for (const auto& req : requests) {
    const auto a = dlwaf::classify(original, req);
    const auto b = dlwaf::classify(copy, req);
    same += a == b;
    blocks += a.action == dlwaf::Action::block;
  }
  c.expect(same == requests.size(), std::to_string(requests.size() - same) + " verdicts changed after round trip");
  c.expect(read_file(copy_path) == read_file(env.bundle()), "re-saved bundle bytes differ");

  auto records = dlwaf::data::generate_synthetic_corpus(500, 77);
  for (int i = 0; i < 500; ++i) {
    dlwaf::data::LabeledRecord r;
    r.payload = dlwaf::testing::random_small_alphabet(rng, 40, "ab'\"\\<>;\n\t {}");
    if (i % 7 == 0) r.payload += "\xC3\xA9";
    r.source = "payload_csv";
    if (i % 2) r.attack_class = dlwaf::data::kAttackClasses[rng.below(5)];
    if (!r.attack_class || *r.attack_class == dlwaf::data::AttackClass::valid) {
      r.l1_label = static_cast<int>(rng.below(2));
    } else if (i % 3) {
      r.l1_label = 1;
    }
    records.push_back(r);
  }
  const auto jsonl = env.work / "roundtrip.jsonl";
  dlwaf::data::to_jsonl(records, jsonl);
  const auto back = dlwaf::data::from_jsonl(jsonl);
  c.expect(back == records, "JSONL records differ after round trip");
  c.note(std::to_string(requests.size()) + " requests (" + std::to_string(blocks) + " blocks) identical; " +
         std::to_string(records.size()) + " JSONL records field-equal");
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  Env env;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") env.cli = argv[i + 1];
    if (flag == "--workdir") env.work = argv[i + 1];
  }
  if (env.cli.empty() || env.work.empty()) {
    std::cerr << "usage: dlwaf_acceptance --cli PATH --workdir DIR\n";
    return 2;
  }
  fs::remove_all(env.work);
  fs::create_directories(env.work);

  nlohmann::json train_report;
  double train_seconds = 0.0;
  std::string prep_error;
  const bool prepared = prepare(env, train_report, train_seconds, prep_error);
  std::shared_ptr<const dlwaf::WafModelBundle> bundle;
  if (prepared) bundle = std::make_shared<const dlwaf::WafModelBundle>(dlwaf::load_bundle(env.bundle()));

  struct Criterion {
    int id;
    const char* title;
    bool needs_bundle;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "metric formulas on headline counts", false, [] { return ac1_metrics(); }},
      {2, "decision truth table and layer-2 gating", true, [&] { return ac2_decision_logic(*bundle); }},
      {3, "false-positive containment", true, [&] { return ac3_fp_containment(env); }},
      {4, "desk-scale accuracy on seed-42 corpus", true, [&] { return ac4_accuracy(train_report, train_seconds); }},
      {5, "feature extraction oracle", false, [] { return ac5_feature_oracle(); }},
      {6, "tf-idf oracle", false, [] { return ac6_tfidf_oracle(); }},
      {7, "svm correctness", false, [] { return ac7_svm(); }},
      {8, "proxy integration", true, [&] { return ac8_proxy(env); }},
      {9, "reproducibility", false, [&] { return ac9_reproducibility(env); }},
      {10, "round trips", true, [&] { return ac10_round_trips(env); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Outcome o;
    if (cr.needs_bundle && !prepared) {
      o = {false, "setup failed: " + prep_error};
    } else {
      try {
        o = cr.run();
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
      }
    }
    failed += !o.pass;
    std::cout << "AC" << cr.id << (cr.id < 10 ? "  " : " ") << (o.pass ? "PASS" : "FAIL") << "  " << cr.title
              << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criterion/criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
