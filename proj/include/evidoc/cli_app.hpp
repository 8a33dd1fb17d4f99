// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace evidoc::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct IndexOptions {
  std::filesystem::path input;   // JSON lines
  std::filesystem::path output;  // binary index
  std::string doc_id;            // used when the input has no header line
};

struct ExportOptions {
  std::filesystem::path input;   // binary index
  std::filesystem::path output;  // JSON lines; "-" for stdout
};

struct AskOptions {
  std::filesystem::path config;
  std::string doc_id;
  std::string question;
  std::optional<std::size_t> k;
  std::filesystem::path mock_script;    // empty = HTTP backends
  std::filesystem::path query_vectors;  // overrides the configured encoder
  std::filesystem::path run_dir;        // overrides <run_dir>/<doc>-<hash>
  bool dry_run = false;
  bool json = false;  // print the answer bundle as JSON
};

struct EvalCommandOptions {
  std::filesystem::path config;  // optional with --predictions
  std::filesystem::path items;
  std::optional<std::size_t> k;
  std::filesystem::path mock_script;
  std::filesystem::path predictions;  // JSON lines {question_id, predicted}
  std::filesystem::path report_dir;   // default <run_dir>/eval
  bool judge = false;
  bool dry_run = false;
};

int run_index(const IndexOptions& options, std::ostream& out, std::ostream& err);
int run_export(const ExportOptions& options, std::ostream& out, std::ostream& err);
int run_ask(const AskOptions& options, std::ostream& out, std::ostream& err);
int run_eval(const EvalCommandOptions& options, std::ostream& out, std::ostream& err);

/// Deterministic per-question run directory name: <doc_id>-<16 hex digits>.
std::string run_directory_name(const std::string& doc_id, const std::string& question);

}  // namespace evidoc::app
