// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "evidoc/eval_harness.hpp"
#include "evidoc/model_gateway.hpp"

namespace evidoc {

struct RetrieverConfig {
  std::string index_path;        // may contain {doc_id}
  std::size_t k = 5;
  std::string query_embeddings;  // JSON-lines file of precomputed query vectors
  std::string encoder_url;       // or an HTTP encoder service
};

/// Declarative pipeline configuration. Every string value may reference
/// environment variables as ${NAME}; unknown keys are rejected.
///
///   {
///     "retriever": {"index_path": "...", "k": 5, "query_embeddings": "...", "encoder_url": "..."},
///     "backends": {"ordinary": {"endpoint": "...", "model": "...", "api_key_env": "..."},
///                  "reasoning": {...} | "ordinary"},
///     "prompts": "dir", "pages": {"image_path": "pages/{doc_id}/page_{page}.png"},
///     "temperature": 0.1, "max_output": 1024, "concurrency": 4, "retries": 2,
///     "backoff_ms": 500, "run_dir": "runs",
///     "eval": {"float_tolerance": 0.01, "unanswerable_markers": [...], "concurrency": 1,
///              "judge": false}
///   }
struct PipelineConfig {
  RetrieverConfig retriever;
  GatewayConfig gateway;
  std::string prompts_dir;  // empty = built-in prompts
  std::string image_path;   // pattern with {doc_id} and {page}
  std::string run_dir = "runs";
  ScoringOptions scoring;
  int eval_concurrency = 1;
  bool judge = false;
  nlohmann::json source;  // as written, before interpolation

  std::filesystem::path index_path_for(const std::string& doc_id) const;
  std::string image_path_for(const std::string& doc_id, int page) const;
};

/// Relative paths are resolved against `base_dir`.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Replaces ${NAME} with the environment value; throws ConfigError if unset.
std::string interpolate_env(const std::string& s);

}  // namespace evidoc
