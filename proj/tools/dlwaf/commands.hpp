// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace dlwaf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitModel = 3;

struct Globals {
  std::uint64_t seed = 42;
  std::string log_level = "info";
};

struct ConvertOptions {
  std::string manifest;
  std::string out;
};

struct GenCorpusOptions {
  std::string out;
  std::size_t size = 2000;
  double normal_share = 0.75;
};

struct TrainOptions {
  std::string l1_data;
  std::string l2_data;  // defaults to l1_data
  std::string out;
  std::string lexicon;
  std::string report = "json";
  std::string report_out;
  double split = 0.8;
  int kfold = 0;
  std::string ngram = "1,4";
  std::string kernel = "rbf";
  double c = 10.0;
  std::string gamma = "scale";
  int max_depth = 12;
  bool no_balance = false;
  int max_passes = 10;
  std::int64_t max_iterations = 200000;
};

struct EvalOptions {
  std::string bundle;
  std::string data;
  std::string report = "table";
  std::string out;
};

struct GridOptions {
  std::string data;
  double split = 0.8;
  int cv = 0;
  double c = 10.0;
  std::string report = "table";
  std::string out;
};

struct PredictOptions {
  std::string bundle;
  std::string file;
  bool payload = false;
};

struct ServeOptions {
  std::string bundle;
  std::string host = "0.0.0.0";
  int listen = 8080;
  std::string upstream;
  std::string fail_mode = "closed";
  std::string audit_log;
  std::size_t max_body_bytes = 1 << 20;
  int block_status = 403;
};

int run_convert(const Globals& g, const ConvertOptions& o);
int run_gen_corpus(const Globals& g, const GenCorpusOptions& o);
int run_train(const Globals& g, const TrainOptions& o);
int run_eval(const Globals& g, const EvalOptions& o);
int run_grid(const Globals& g, const GridOptions& o);
int run_predict(const Globals& g, const PredictOptions& o);
int run_serve(const Globals& g, const ServeOptions& o);

}  // namespace dlwaf::cli
