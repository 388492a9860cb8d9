// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <pthread.h>
#include <spdlog/spdlog.h>

#include "dlwaf/datasets.hpp"
#include "dlwaf/error.hpp"
#include "dlwaf/eval.hpp"
#include "dlwaf/pipeline.hpp"
#include "dlwaf/proxy.hpp"
#include "dlwaf/random.hpp"
#include "dlwaf/synthetic.hpp"
#include "dlwaf/training.hpp"

namespace dlwaf::cli {

namespace {

// Thrown for bad user input; maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(int code, const std::string& message) {
  spdlog::error("{}", message);
  return code;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << text;
}

std::vector<data::LabeledRecord> read_records(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("missing ") + what);
  auto records = data::from_jsonl(path);
  if (records.empty()) throw Error(ErrorCode::empty_file, path + " holds no records");
  return records;
}

void check_report_format(const std::string& fmt) {
  if (fmt != "json" && fmt != "table") throw InputError("--report must be json or table, got " + fmt);
}

std::pair<int, int> parse_ngram(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const int lo = std::stoi(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument(s);
    const auto hi_text = s.substr(comma + 1);
    const int hi = std::stoi(hi_text, &used);
    if (used != hi_text.size() || lo < 1 || hi < lo) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw InputError("--ngram must look like MIN,MAX with 1 <= MIN <= MAX, got " + s);
  }
}

std::optional<double> parse_gamma(const std::string& s) {
  if (s == "scale") return std::nullopt;
  try {
    std::size_t used = 0;
    const double g = std::stod(s, &used);
    if (used != s.size() || !(g > 0.0)) throw std::invalid_argument(s);
    return g;
  } catch (const std::logic_error&) {
    throw InputError("--gamma must be 'scale' or a positive number, got " + s);
  }
}

svm::KernelKind parse_kernel(const std::string& s) {
  try {
    return svm::kernel_kind_from_string(s);
  } catch (const Error&) {
    throw InputError("--kernel must be linear or rbf, got " + s);
  }
}

// Runs body; maps InputError and input-side dlwaf errors to 2, the rest to 3.
template <typename Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    return fail(kExitInput, e.what());
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::malformed_request:
      case ErrorCode::io_error:
      case ErrorCode::empty_file:
      case ErrorCode::missing_column:
      case ErrorCode::unmapped_label:
      case ErrorCode::schema_violation:
      case ErrorCode::manifest_error:
      case ErrorCode::invalid_argument:
      case ErrorCode::bind_error:
        return fail(kExitInput, e.what());
      default:
        return fail(kExitModel, e.what());
    }
  }
}

}  // namespace

int run_convert(const Globals& g, const ConvertOptions& o) {
  return guarded([&] {
    if (o.out.empty()) throw InputError("missing --out");
    const auto manifest = data::load_manifest(o.manifest);
    std::vector<data::LabeledRecord> all;
    for (const auto& src : manifest.sources) {
      auto loaded = data::load_source(src);
      for (const auto& w : loaded.warnings) spdlog::warn("{}: block {} skipped: {}", src.name, w.block, w.message);
      spdlog::info("{}: {} records", src.name, loaded.records.size());
      all.insert(all.end(), std::make_move_iterator(loaded.records.begin()),
                 std::make_move_iterator(loaded.records.end()));
    }
    auto [cleaned, report] = data::clean(std::move(all));
    std::vector<std::vector<data::LabeledRecord>> lists;
    lists.push_back(std::move(cleaned));
    const auto merged = data::merge(std::move(lists), derive_seed(g.seed, "merge"));
    data::to_jsonl(merged, o.out);
    std::cerr << data::to_json(report).dump() << '\n';
    spdlog::info("wrote {} records to {}", merged.size(), o.out);
    return kExitOk;
  });
}

int run_gen_corpus(const Globals& g, const GenCorpusOptions& o) {
  return guarded([&] {
    if (o.out.empty()) throw InputError("missing --out");
    if (o.size == 0) throw InputError("--size must be > 0");
    if (!(o.normal_share >= 0.0 && o.normal_share <= 1.0)) throw InputError("--normal-share must lie in [0, 1]");
    data::SyntheticOptions opts;
    opts.normal_share_of_valid = o.normal_share;
    const auto records = data::generate_synthetic_corpus(o.size, derive_seed(g.seed, "corpus"), opts);
    for (const auto& msg : data::synthetic_self_check(records)) spdlog::warn("self-check: {}", msg);
    data::to_jsonl(records, o.out);
    spdlog::info("wrote {} records to {}", records.size(), o.out);
    return kExitOk;
  });
}

int run_train(const Globals& g, const TrainOptions& o) {
  return guarded([&] {
    if (o.out.empty()) throw InputError("missing --out");
    check_report_format(o.report);
    if (!(o.split > 0.0 && o.split < 1.0)) throw InputError("--split must lie in (0, 1)");
    if (o.kfold == 1 || o.kfold < 0) throw InputError("--kfold must be 0 (off) or >= 2");
    if (!(o.c > 0.0)) throw InputError("--c must be > 0");

    training::TrainConfig cfg;
    cfg.seed = g.seed;
    cfg.split = o.split;
    cfg.kfold = o.kfold;
    cfg.balance_l1 = !o.no_balance;
    cfg.tree.max_depth = o.max_depth > 0 ? std::optional<int>(o.max_depth) : std::nullopt;
    const auto [lo, hi] = parse_ngram(o.ngram);
    cfg.l2.ngram.min_n = lo;
    cfg.l2.ngram.max_n = hi;
    cfg.l2.kernel = parse_kernel(o.kernel);
    cfg.l2.gamma = parse_gamma(o.gamma);
    cfg.l2.svm.C = o.c;
    cfg.l2.svm.max_passes = o.max_passes;
    cfg.l2.svm.max_iterations = o.max_iterations;
    if (!o.lexicon.empty()) cfg.lexicon = features::load_lexicon(o.lexicon);

    const auto l1_records = read_records(o.l1_data, "--l1-data");
    const auto l2_records = o.l2_data.empty() ? l1_records : read_records(o.l2_data, "--l2-data");

    training::Layer1Result l1;
    training::Layer2Result l2;
    try {
      l1 = training::train_layer1(l1_records, cfg);
    } catch (const Error& e) {
      return fail(kExitModel, std::string("layer 1 training failed: ") + e.what());
    }
    try {
      l2 = training::train_layer2(l2_records, cfg);
    } catch (const Error& e) {
      return fail(kExitModel, std::string("layer 2 training failed: ") + e.what());
    }
    if (!l2.report.converged) spdlog::warn("layer 2: SMO hit max_iterations for at least one class");

    WafModelBundle bundle;
    bundle.lexicon = cfg.lexicon;
    bundle.inspection = cfg.inspection;
    bundle.l1 = std::move(l1.model);
    bundle.vocab = std::move(l2.model.vocab);
    bundle.l2 = std::move(l2.model.svm);
    bundle.created_at = training::build_timestamp();
    bundle.training_fingerprint = training::training_fingerprint(l1_records, l2_records, cfg);
    save_bundle(bundle, o.out);
    spdlog::info("bundle written to {} (fingerprint {})", o.out, bundle.training_fingerprint);

    std::string text;
    if (o.report == "json") {
      nlohmann::json j;
      j["seed"] = g.seed;
      j["config"] = training::to_json(cfg);
      j["layer1"] = training::to_json(l1.report);
      j["layer2"] = training::to_json(l2.report);
      j["training_fingerprint"] = bundle.training_fingerprint;
      text = j.dump(2) + "\n";
    } else {
      std::ostringstream ss;
      ss << "Layer 1 (decision tree) holdout, " << l1.report.n_test << " records\n";
      ss << eval::format_comparison_table(l1.report.holdout, l1.report.holdout);
      if (l1.report.cv) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu-fold CV accuracy: %.4f (std %.4f)\n", l1.report.cv->folds.size(),
                      l1.report.cv->mean_accuracy, l1.report.cv->std_accuracy);
        ss << buf;
      }
      ss << "\nLayer 2 (SVM) holdout, " << l2.report.n_test << " records\n";
      ss << eval::format_per_class_table(l2.report.holdout);
      text = ss.str();
    }
    write_text(text, o.report_out);
    return kExitOk;
  });
}

int run_eval(const Globals&, const EvalOptions& o) {
  return guarded([&] {
    check_report_format(o.report);
    if (o.bundle.empty()) throw InputError("missing --bundle");
    const auto records = read_records(o.data, "--data");
    for (const auto& r : records) {
      if (!threat_label(r)) throw InputError("unlabeled record in " + o.data);
    }
    const auto bundle = load_bundle(o.bundle);
    const auto report = evaluate_bundle(bundle, records);
    if (report.combined.confusion.fp > report.layer1_only.confusion.fp) {
      spdlog::error("combined false positives exceed layer-1 false positives");
    }
    write_text(o.report == "json" ? to_json(report).dump(2) + "\n" : format_report_table(report), o.out);
    return kExitOk;
  });
}

int run_grid(const Globals& g, const GridOptions& o) {
  return guarded([&] {
    check_report_format(o.report);
    if (!(o.c > 0.0)) throw InputError("--c must be > 0");
    if (o.cv == 1 || o.cv < 0) throw InputError("--cv must be 0 (off) or >= 2");
    const auto records = read_records(o.data, "--data");
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& r : records) {
      if (r.attack_class) rows.emplace_back(data::inspection_text(r), std::string(data::to_string(*r.attack_class)));
    }
    if (rows.empty()) throw InputError(o.data + " has no records with an attack class");

    eval::GridOptions opts;
    opts.svm.C = o.c;
    opts.svm.seed = derive_seed(g.seed, "smo");
    const auto grid = eval::default_grid();
    eval::GridResult result;
    auto unzip = [](const auto& pairs, std::vector<std::string>& texts, std::vector<std::string>& labels) {
      for (const auto& [t, l] : pairs) {
        texts.push_back(t);
        labels.push_back(l);
      }
    };
    if (o.cv >= 2) {
      std::vector<std::string> texts, labels;
      unzip(rows, texts, labels);
      result = eval::grid_search_cv(texts, labels, grid, o.cv, derive_seed(g.seed, "kfold"), opts);
    } else {
      if (!(o.split > 0.0 && o.split < 1.0)) throw InputError("--split must lie in (0, 1)");
      auto [train, val] = data::split(std::move(rows), o.split, derive_seed(g.seed, "split"));
      std::vector<std::string> tt, tl, vt, vl;
      unzip(train, tt, tl);
      unzip(val, vt, vl);
      result = eval::grid_search(tt, tl, vt, vl, grid, opts);
    }
    write_text(o.report == "json" ? eval::to_json(result).dump(2) + "\n" : eval::format_grid_table(result), o.out);
    return kExitOk;
  });
}

int run_predict(const Globals&, const PredictOptions& o) {
  return guarded([&] {
    if (o.bundle.empty()) throw InputError("missing --bundle");
    std::string input;
    if (o.file.empty() || o.file == "-") {
      input.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
      std::ifstream in(o.file, std::ios::binary);
      if (!in) throw Error(ErrorCode::io_error, "cannot read " + o.file);
      input.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    std::optional<http::HttpRequest> req;
    if (!o.payload) req = http::parse_raw_request(input);  // malformed input fails before the bundle loads
    const auto bundle = load_bundle(o.bundle);
    const Verdict v = req ? classify(bundle, *req) : classify_payload(bundle, input);
    std::cout << to_json(v).dump() << '\n';
    return kExitOk;
  });
}

int run_serve(const Globals&, const ServeOptions& o) {
  return guarded([&] {
    if (o.upstream.empty()) throw InputError("missing --upstream");
    if (o.bundle.empty()) throw InputError("missing --bundle");
    proxy::ProxyConfig cfg;
    cfg.listen_host = o.host;
    cfg.listen_port = o.listen;
    cfg.upstream_url = o.upstream;
    cfg.fail_mode = proxy::fail_mode_from_string(o.fail_mode);
    cfg.max_body_bytes = o.max_body_bytes;
    cfg.block_status = o.block_status;
    cfg.audit_log_path = o.audit_log;
    cfg.bundle_path = o.bundle;
    cfg.validate();

    // Handle signals synchronously on this thread; worker threads inherit the mask.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    sigaddset(&set, SIGHUP);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    proxy::Proxy server(cfg);
    server.start();
    std::cout << "listening on " << cfg.listen_host << ":" << server.port() << std::endl;
    for (;;) {
      int sig = 0;
      if (sigwait(&set, &sig) != 0) continue;
      if (sig == SIGHUP) {
        if (auto err = server.reload()) spdlog::error("reload failed: {}", *err);
        continue;
      }
      spdlog::info("signal {} received, draining", sig);
      break;
    }
    server.stop();
    const auto s = server.stats();
    spdlog::info("handled {} requests: {} allowed, {} blocked, {} upstream errors", s.handled, s.allowed, s.blocked,
                 s.upstream_errors);
    return kExitOk;
  });
}

}  // namespace dlwaf::cli
