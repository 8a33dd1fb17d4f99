// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evidoc/cli_app.hpp"
#include "evidoc/logging.hpp"

int main(int argc, char** argv) {
  using namespace evidoc::app;
  CLI::App cli{"evidoc: evidence-driven question answering over document page images"};
  cli.require_subcommand(1);
  std::string log_level = "warn";
  cli.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  IndexOptions index_opts;
  auto* index = cli.add_subcommand("index", "Build a binary index from JSON-lines page embeddings");
  index->add_option("input", index_opts.input, "JSON-lines embeddings")->required();
  index->add_option("output", index_opts.output, "Output index file")->required();
  index->add_option("--doc-id", index_opts.doc_id, "Document id when the input has no header");

  ExportOptions export_opts;
  auto* exp = cli.add_subcommand("export", "Dump a binary index as JSON lines");
  exp->add_option("input", export_opts.input, "Index file")->required();
  exp->add_option("output", export_opts.output, "Output file (default stdout)");

  AskOptions ask_opts;
  std::size_t ask_k = 0;
  auto* ask = cli.add_subcommand("ask", "Answer one question about one document");
  ask->add_option("question", ask_opts.question, "Question text")->required();
  ask->add_option("-c,--config", ask_opts.config, "Pipeline config (JSON)")->required();
  ask->add_option("-d,--doc", ask_opts.doc_id, "Document id")->required();
  auto* ask_k_opt = ask->add_option("-k,--k", ask_k, "Number of pages to retrieve");
  ask->add_option("--mock", ask_opts.mock_script, "Scripted mock backend instead of HTTP");
  ask->add_option("--query-vectors", ask_opts.query_vectors, "Precomputed query vectors (JSON)");
  ask->add_option("--run-dir", ask_opts.run_dir, "Run directory override");
  ask->add_flag("--dry-run", ask_opts.dry_run, "Validate inputs without calling any model");
  ask->add_flag("--json", ask_opts.json, "Print the answer bundle as JSON");

  EvalCommandOptions eval_opts;
  std::size_t eval_k = 0;
  auto* eval = cli.add_subcommand("eval", "Run and score a question suite");
  eval->add_option("-c,--config", eval_opts.config, "Pipeline config (JSON)");
  eval->add_option("-i,--items", eval_opts.items, "Items (JSON lines)")->required();
  auto* eval_k_opt = eval->add_option("-k,--k", eval_k, "Number of pages to retrieve");
  eval->add_option("--mock", eval_opts.mock_script, "Scripted mock backend instead of HTTP");
  eval->add_option("--predictions", eval_opts.predictions, "Score these predictions only");
  eval->add_option("--report-dir", eval_opts.report_dir, "Where report.json/report.txt go");
  eval->add_flag("--judge", eval_opts.judge, "Extract short answers with a judge model");
  eval->add_flag("--dry-run", eval_opts.dry_run, "Validate inputs without calling any model");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  evidoc::configure_logging(log_level);

  if (*index) return run_index(index_opts, std::cout, std::cerr);
  if (*exp) return run_export(export_opts, std::cout, std::cerr);
  if (*ask) {
    if (*ask_k_opt) ask_opts.k = ask_k;
    return run_ask(ask_opts, std::cout, std::cerr);
  }
  if (*eval_k_opt) eval_opts.k = eval_k;
  return run_eval(eval_opts, std::cout, std::cerr);
}
