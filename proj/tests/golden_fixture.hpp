// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <string>

#include "evidoc/core_decision.hpp"
#include "evidoc/query_encoder.hpp"
#include "test_support.hpp"

namespace evidoc::testing {

inline constexpr const char* kGoldenQuestion =
    "By what percentage did revenue grow from 2022 to 2023?";

inline std::filesystem::path golden_dir() { return fixture_dir() / "golden"; }

inline MultiVectorIndex golden_index() { return import_jsonl(golden_dir() / "index.jsonl"); }

inline QueryEmbedding golden_query() { return read_query_vectors(golden_dir() / "query.json"); }

inline nlohmann::json golden_script() {
  return nlohmann::json::parse(read_file(golden_dir() / "mock_script.json"));
}

inline ImageRef golden_image(int page) {
  return {page, "pages/annual_report/page_" + std::to_string(page) + ".png"};
}

inline const char* const kRunFiles[] = {"query.json",     "retrieval.json", "clues.jsonl",
                                        "verdicts.jsonl", "context.txt",    "decision.json",
                                        "answer.json"};

/// One scripted run of the golden fixture at top-k = `k`.
inline RunRecord run_golden(std::size_t k = 5, int concurrency = 1,
                            std::shared_ptr<MockBackend>* backend_out = nullptr) {
  auto backend = std::make_shared<MockBackend>(golden_script());
  Gateway gateway(mock_gateway_config(concurrency), backend);
  auto run = run_pipeline(golden_index(), golden_query(), kGoldenQuestion, k, gateway,
                          PromptTemplates::builtin(), golden_image);
  if (backend_out) *backend_out = backend;
  return run;
}

}  // namespace evidoc::testing
