// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "config_json.hpp"

namespace cli = dlwaf::cli;

int main(int argc, char** argv) {
  CLI::App app{"dlwaf: dual-layer machine-learning web application firewall"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<cli::ConfigJson>());

  cli::Globals g;
  bool dump_config = false;
  app.add_option("--seed", g.seed, "Master seed for every randomized step");
  app.set_config("--config", "", "JSON file with option values (command-line flags win)");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_flag("--dump-config", dump_config, "Print the effective configuration as JSON and exit")
      ->configurable(false);

  cli::ConvertOptions convert;
  auto* c = app.add_subcommand("convert", "Load manifest sources, clean, merge and write JSONL");
  c->add_option("--manifest", convert.manifest, "Corpus manifest (JSON)")->required();
  c->add_option("--out", convert.out, "Output JSONL path")->required();

  cli::GenCorpusOptions gen;
  auto* gc = app.add_subcommand("gen-corpus", "Write the synthetic labeled mini-corpus as JSONL");
  gc->add_option("--out", gen.out, "Output JSONL path")->required();
  gc->add_option("--size", gen.size, "Number of records");
  gc->add_option("--normal-share", gen.normal_share, "Share of valid records that are ordinary traffic");

  cli::TrainOptions train;
  auto* t = app.add_subcommand("train", "Train both layers and write a model bundle");
  t->add_option("--l1-data", train.l1_data, "JSONL records with l1 labels")->required();
  t->add_option("--l2-data", train.l2_data, "JSONL records with attack classes (default: --l1-data)");
  t->add_option("--out", train.out, "Bundle path (*.wafmodel.json)")->required();
  t->add_option("--lexicon", train.lexicon, "Lexicon JSON (default: built-in)");
  t->add_option("--split", train.split, "Train fraction for the holdout split");
  t->add_option("--kfold", train.kfold, "Layer-1 cross-validation folds (0 = off)");
  t->add_option("--ngram", train.ngram, "Character n-gram range MIN,MAX");
  t->add_option("--kernel", train.kernel, "linear or rbf");
  t->add_option("--c", train.c, "SVM regularization C");
  t->add_option("--gamma", train.gamma, "RBF gamma or 'scale'");
  t->add_option("--max-depth", train.max_depth, "Decision tree depth limit (0 = unbounded)");
  t->add_flag("--no-balance", train.no_balance, "Skip undersampling of the Layer-1 majority class");
  t->add_option("--max-passes", train.max_passes, "SMO quiet sweeps before stopping");
  t->add_option("--max-iterations", train.max_iterations, "SMO iteration cap per binary model");
  t->add_option("--report", train.report, "json or table");
  t->add_option("--report-out", train.report_out, "Write the report here instead of stdout");

  cli::EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Score a bundle on labeled data (Layer 1 alone vs both layers)");
  e->add_option("--bundle", ev.bundle, "Model bundle")->required();
  e->add_option("--data", ev.data, "Labeled JSONL records")->required();
  e->add_option("--report", ev.report, "json or table");
  e->add_option("--out", ev.out, "Write the report here instead of stdout");

  cli::GridOptions grid;
  auto* gr = app.add_subcommand("grid", "Grid search over n-gram ranges and kernels");
  gr->add_option("--data", grid.data, "JSONL records with attack classes")->required();
  gr->add_option("--split", grid.split, "Train fraction when --cv is off");
  gr->add_option("--cv", grid.cv, "Score each cell by k-fold cross-validation (0 = off)");
  gr->add_option("--c", grid.c, "SVM regularization C");
  gr->add_option("--report", grid.report, "json or table");
  gr->add_option("--out", grid.out, "Write the report here instead of stdout");

  cli::PredictOptions pred;
  auto* p = app.add_subcommand("predict", "Classify one raw HTTP request (stdin or --file)");
  p->add_option("--bundle", pred.bundle, "Model bundle")->required();
  p->add_option("--file", pred.file, "Request file ('-' or empty: stdin)");
  p->add_flag("--payload", pred.payload, "Treat the input as a bare payload string");

  cli::ServeOptions serve;
  auto* s = app.add_subcommand("serve", "Run the inspecting reverse proxy");
  s->add_option("--bundle", serve.bundle, "Model bundle")->required();
  s->add_option("--host", serve.host, "Listen address");
  s->add_option("--listen", serve.listen, "Listen port");
  s->add_option("--upstream", serve.upstream, "Upstream base URL, http://host:port")->required();
  s->add_option("--fail-mode", serve.fail_mode, "open or closed")->check(CLI::IsMember({"open", "closed"}));
  s->add_option("--audit-log", serve.audit_log, "Append audit records (JSONL) to this file");
  s->add_option("--max-body-bytes", serve.max_body_bytes, "Largest inspected request body");
  s->add_option("--block-status", serve.block_status, "HTTP status for blocked requests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ok) {
    return app.exit(ok);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return cli::kExitInput;
  }

  if (dump_config) {
    std::cout << app.config_to_str(true, false);
    return cli::kExitOk;
  }

  auto logger = spdlog::stderr_logger_mt("dlwaf");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(g.log_level));
  spdlog::info("seed {}", g.seed);

  if (c->parsed()) return cli::run_convert(g, convert);
  if (gc->parsed()) return cli::run_gen_corpus(g, gen);
  if (t->parsed()) return cli::run_train(g, train);
  if (e->parsed()) return cli::run_eval(g, ev);
  if (gr->parsed()) return cli::run_grid(g, grid);
  if (p->parsed()) return cli::run_predict(g, pred);
  if (s->parsed()) return cli::run_serve(g, serve);
  return cli::kExitInput;
}
