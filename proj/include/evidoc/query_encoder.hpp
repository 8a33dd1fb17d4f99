// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "evidoc/embedding_index.hpp"

namespace evidoc {

/// Supplies query embeddings produced by an external encoder.
class QueryEncoder {
 public:
  virtual ~QueryEncoder() = default;
  virtual QueryEmbedding encode(const std::string& question, const std::string& question_id) = 0;
};

/// Precomputed embeddings, JSON lines of
///   {"question_id": "...", "question": "...", "vectors": [[...], ...]}
/// Looked up by question_id first, then by exact question text.
class FileQueryEncoder final : public QueryEncoder {
 public:
  explicit FileQueryEncoder(const std::filesystem::path& path);
  QueryEmbedding encode(const std::string& question, const std::string& question_id) override;

 private:
  std::map<std::string, QueryEmbedding> by_id_;
  std::map<std::string, QueryEmbedding> by_text_;
};

/// POSTs {"text": question} to `url` and expects {"vectors": [[...], ...]} back.
class HttpQueryEncoder final : public QueryEncoder {
 public:
  explicit HttpQueryEncoder(std::string url);
  QueryEmbedding encode(const std::string& question, const std::string& question_id) override;

 private:
  std::string url_;
};

/// Reads a single query embedding file: {"vectors": [[...], ...]} or a bare array.
QueryEmbedding read_query_vectors(const std::filesystem::path& path);

}  // namespace evidoc
