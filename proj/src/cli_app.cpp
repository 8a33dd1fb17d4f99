// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/cli_app.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>

#include <nlohmann/json.hpp>

#include "evidoc/config.hpp"
#include "evidoc/core_decision.hpp"
#include "evidoc/errors.hpp"
#include "evidoc/eval_harness.hpp"
#include "evidoc/query_encoder.hpp"

namespace evidoc::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fnv_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

PromptTemplates templates_for(const PipelineConfig& config) {
  return config.prompts_dir.empty() ? PromptTemplates::builtin()
                                    : PromptTemplates::load(config.prompts_dir);
}

std::shared_ptr<Backend> backend_for(const fs::path& mock_script) {
  if (!mock_script.empty()) return MockBackend::from_file(mock_script);
  return std::make_shared<HttpBackend>();
}

std::unique_ptr<QueryEncoder> encoder_for(const PipelineConfig& config) {
  if (!config.retriever.query_embeddings.empty()) {
    return std::make_unique<FileQueryEncoder>(config.retriever.query_embeddings);
  }
  if (!config.retriever.encoder_url.empty()) {
    return std::make_unique<HttpQueryEncoder>(config.retriever.encoder_url);
  }
  return nullptr;
}

MultiVectorIndex open_index(const PipelineConfig& config, const std::string& doc_id) {
  const auto path = config.index_path_for(doc_id);
  if (!fs::exists(path)) throw Error("index not found: " + path.string());
  return read_index(path);
}

ImageResolver resolver_for(const PipelineConfig& config, const std::string& doc_id) {
  return [&config, doc_id](int page) {
    return ImageRef{page, config.image_path_for(doc_id, page)};
  };
}

void snapshot_inputs(const PipelineConfig& config, const fs::path& mock_script,
                     const fs::path& dir) {
  write_text(dir / "config.json", config.source.dump(2) + "\n");
  if (!mock_script.empty()) fs::copy_file(mock_script, dir / "mock_script.json",
                                          fs::copy_options::overwrite_existing);
}

std::map<std::string, std::string> load_predictions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open predictions " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      out[j.at("question_id").get<std::string>()] = j.at("predicted").get<std::string>();
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

std::string run_directory_name(const std::string& doc_id, const std::string& question) {
  return doc_id + "-" + fnv_hex(question);
}

int run_index(const IndexOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::exists(options.input)) throw ConfigError("input not found: " + options.input.string());
    const auto index = import_jsonl(options.input, options.doc_id);
    write_index(index, options.output);
    out << "wrote " << options.output.string() << ": doc " << index.doc_id() << ", "
        << index.page_count() << " pages, dim " << index.dim() << ", " << index.vector_count()
        << " vectors\n";
    return kExitOk;
  });
}

int run_export(const ExportOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::exists(options.input)) throw Error("index not found: " + options.input.string());
    const auto index = read_index(options.input);
    if (options.output.empty() || options.output == "-") {
      export_jsonl(index, out);
    } else {
      std::ofstream file(options.output, std::ios::binary | std::ios::trunc);
      if (!file) throw Error("cannot write " + options.output.string());
      export_jsonl(index, file);
    }
    return kExitOk;
  });
}

int run_ask(const AskOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.doc_id.empty()) throw ConfigError("--doc is required");
    if (options.question.empty()) throw ConfigError("a question is required");
    const auto config = load_config(options.config);
    const auto templates = templates_for(config);
    const auto k = options.k.value_or(config.retriever.k);
    if (k < 1) throw ConfigError("k must be >= 1");
    const auto index = open_index(config, options.doc_id);

    std::unique_ptr<QueryEncoder> encoder;
    if (options.query_vectors.empty()) {
      encoder = encoder_for(config);
      if (!encoder) throw ConfigError("no query embeddings: set retriever.query_embeddings, "
                                      "retriever.encoder_url or pass --query-vectors");
    }
    if (options.dry_run) {
      out << "dry run ok: doc " << index.doc_id() << ", " << index.page_count()
          << " pages, k=" << k << "\n";
      return kExitOk;
    }
    const auto query = options.query_vectors.empty() ? encoder->encode(options.question, "")
                                                     : read_query_vectors(options.query_vectors);

    Gateway gateway(config.gateway, backend_for(options.mock_script));
    const auto run = run_pipeline(index, query, options.question, k, gateway, templates,
                                  resolver_for(config, options.doc_id));

    const auto dir = options.run_dir.empty()
                         ? fs::path(config.run_dir) / run_directory_name(options.doc_id,
                                                                        options.question)
                         : options.run_dir;
    fs::create_directories(dir);
    write_run_directory(run, dir);
    snapshot_inputs(config, options.mock_script, dir);

    if (options.json) {
      out << to_json(run.answer).dump(2) << "\n";
    } else {
      out << run.answer.answer << "\n";
      for (const auto& ref : run.answer.references) {
        out << "  [page " << ref.page_index << ", " << ref.evidence_source << "] "
            << ref.evidence_content << "\n";
      }
    }
    err << "run directory: " << dir.string() << "\n";
    return kExitOk;
  });
}

int run_eval(const EvalCommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::exists(options.items)) throw ConfigError("items not found: " + options.items.string());
    const auto items = load_items(options.items);
    if (items.empty()) throw ConfigError("no items in " + options.items.string());

    std::optional<PipelineConfig> config;
    if (!options.config.empty()) config = load_config(options.config);
    if (!config && options.predictions.empty()) {
      throw ConfigError("--config is required unless --predictions is given");
    }
    if (!config && options.judge) throw ConfigError("--judge requires --config");

    EvalOptions eval_options;
    if (config) {
      eval_options.scoring = config->scoring;
      eval_options.concurrency = config->eval_concurrency;
    }

    std::optional<PromptTemplates> templates;
    std::size_t k = 0;
    if (config && options.predictions.empty()) {
      templates = templates_for(*config);
      k = options.k.value_or(config->retriever.k);
      if (k < 1) throw ConfigError("k must be >= 1");
    }

    if (options.dry_run) {
      out << "dry run ok: " << items.size() << " items\n";
      return kExitOk;
    }

    std::unique_ptr<Gateway> gateway;
    if (config && (options.judge || config->judge || options.predictions.empty())) {
      gateway = std::make_unique<Gateway>(config->gateway, backend_for(options.mock_script));
    }
    if (gateway && (options.judge || config->judge)) {
      eval_options.extract = make_judge_extractor(*gateway);
    }

    const fs::path report_dir =
        !options.report_dir.empty() ? options.report_dir
                                    : (config ? fs::path(config->run_dir) / "eval" : fs::path("."));
    fs::create_directories(report_dir);

    ScoreReport report;
    if (!options.predictions.empty()) {
      report = score_predictions(items, load_predictions(options.predictions), eval_options);
    } else {
      auto encoder = encoder_for(*config);
      if (!encoder) throw ConfigError("no query embeddings: set retriever.query_embeddings "
                                      "or retriever.encoder_url");
      std::mutex mu;
      std::map<std::string, std::shared_ptr<const MultiVectorIndex>> indices;
      auto index_for = [&](const std::string& doc_id) {
        std::lock_guard lock(mu);
        auto& slot = indices[doc_id];
        if (!slot) slot = std::make_shared<const MultiVectorIndex>(open_index(*config, doc_id));
        return slot;
      };
      const auto runs_dir = report_dir / "runs";
      fs::create_directories(runs_dir);
      snapshot_inputs(*config, options.mock_script, report_dir);

      report = run_eval(
          items,
          [&](const EvalItem& item) {
            const auto index = index_for(item.doc_id);
            QueryEmbedding query;
            {
              std::lock_guard lock(mu);
              query = encoder->encode(item.question, item.question_id);
            }
            const auto run = run_pipeline(*index, query, item.question, k, *gateway, *templates,
                                          resolver_for(*config, item.doc_id));
            const auto dir = runs_dir / item.question_id;
            fs::create_directories(dir);
            write_run_directory(run, dir);
            return run.answer.answer;
          },
          eval_options);
    }

    write_text(report_dir / "report.json", to_json(report).dump(2) + "\n");
    const auto table = format_table(report);
    write_text(report_dir / "report.txt", table);
    out << table;
    for (const auto& r : report.items) {
      if (r.status == ItemStatus::kError) err << "item " << r.question_id << ": " << r.reason << "\n";
      if (r.status == ItemStatus::kInvalid) {
        err << "item " << r.question_id << " skipped: " << r.reason << "\n";
      }
    }
    err << "report: " << (report_dir / "report.json").string() << "\n";
    return report.errored > 0 ? kExitFailure : kExitOk;
  });
}

}  // namespace evidoc::app
