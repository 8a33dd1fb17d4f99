// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace evidoc {

/// Row-major block of `count` vectors of width `dim`. Used for both the query
/// side and the page side of late-interaction scoring.
class VectorSet {
 public:
  VectorSet() = default;
  VectorSet(std::size_t dim, std::vector<float> values);
  static VectorSet from_rows(const std::vector<std::vector<float>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const float> values() const noexcept { return values_; }

  void append(std::span<const float> row);

  friend bool operator==(const VectorSet&, const VectorSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

struct PageEmbedding {
  int page_index = 0;  // 1-based
  VectorSet vectors;

  friend bool operator==(const PageEmbedding&, const PageEmbedding&) = default;
};

using QueryEmbedding = VectorSet;

struct RelevanceScore {
  int page_index = 0;
  double score = 0.0;

  friend bool operator==(const RelevanceScore&, const RelevanceScore&) = default;
};

/// Immutable per-document store of page embeddings, sorted by page_index.
class MultiVectorIndex {
 public:
  MultiVectorIndex() = default;

  /// Sorts pages and validates every invariant; throws ContractViolation.
  MultiVectorIndex(std::string doc_id, std::size_t dim, std::vector<PageEmbedding> pages,
                   bool l2_normalized = false);

  const std::string& doc_id() const noexcept { return doc_id_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<PageEmbedding>& pages() const noexcept { return pages_; }
  std::size_t page_count() const noexcept { return pages_.size(); }
  std::size_t vector_count() const noexcept;

  /// Provenance flag recorded by the importer. Vectors are never rescaled.
  bool l2_normalized() const noexcept { return l2_normalized_; }

  friend bool operator==(const MultiVectorIndex&, const MultiVectorIndex&) = default;

 private:
  std::string doc_id_;
  std::size_t dim_ = 0;
  std::vector<PageEmbedding> pages_;
  bool l2_normalized_ = false;
};

/// Late-interaction relevance: sum over query vectors of the best inner product
/// against any page vector.
RelevanceScore score_page(const QueryEmbedding& query, const PageEmbedding& page);

/// Top-k pages by score, descending; equal scores ordered by ascending
/// page_index. Returns min(k, N) entries.
std::vector<RelevanceScore> retrieve_top_k(const MultiVectorIndex& index,
                                           const QueryEmbedding& query, std::size_t k);

// Binary codec. Layout (all integers u32 little-endian):
//   magic "MVIX" | version | dim | flags | doc_id_len | doc_id bytes | page_count
//   then per page: page_index | n_vectors | n_vectors*dim f32 LE, row-major
inline constexpr std::uint32_t kIndexFormatVersion = 1;

void write_index(const MultiVectorIndex& index, std::ostream& out);
void write_index(const MultiVectorIndex& index, const std::filesystem::path& path);
MultiVectorIndex read_index(std::istream& in);
MultiVectorIndex read_index(const std::filesystem::path& path);

// JSON-lines interchange: an optional header line {"doc_id": ..., "l2_normalized": ...}
// followed by one {"page_index": i, "vectors": [[...], ...]} object per line.
// Schema violations raise ContractViolation naming the 1-based line number.
MultiVectorIndex import_jsonl(std::istream& in, const std::string& fallback_doc_id = "");
MultiVectorIndex import_jsonl(const std::filesystem::path& path,
                              const std::string& fallback_doc_id = "");
void export_jsonl(const MultiVectorIndex& index, std::ostream& out);

}  // namespace evidoc
