// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/embedding_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "evidoc/errors.hpp"

namespace evidoc {

namespace {

constexpr char kMagic[4] = {'M', 'V', 'I', 'X'};
constexpr std::uint32_t kFlagL2Normalized = 1u;
constexpr std::uint32_t kMaxDocIdLen = 1u << 16;
constexpr std::size_t kParallelPageThreshold = 256;

void require_finite(std::span<const float> values, const char* what) {
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw ContractViolation(std::string(what) + ": non-finite embedding entry");
    }
  }
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

double max_sim(const QueryEmbedding& query, const VectorSet& page) {
  double total = 0.0;
  for (std::size_t t = 0; t < query.size(); ++t) {
    const auto q = query.row(t);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < page.size(); ++j) best = std::max(best, dot(q, page.row(j)));
    total += best;
  }
  return total;
}

// --- little-endian primitives -------------------------------------------

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t decode_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void read(void* dst, std::size_t n, IndexFileError::Kind kind, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw IndexFileError(kind, std::string("unexpected end of file while reading ") + what);
    }
  }

  std::uint32_t u32(IndexFileError::Kind kind, const char* what) {
    unsigned char b[4];
    read(b, 4, kind, what);
    return decode_u32(b);
  }

  bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

}  // namespace

// --- VectorSet ------------------------------------------------------------

VectorSet::VectorSet(std::size_t dim, std::vector<float> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 && !values_.empty()) throw ContractViolation("vector set: dim must be positive");
  if (dim_ != 0 && values_.size() % dim_ != 0) {
    throw ContractViolation("vector set: value count " + std::to_string(values_.size()) +
                            " is not a multiple of dim " + std::to_string(dim_));
  }
  require_finite(values_, "vector set");
}

VectorSet VectorSet::from_rows(const std::vector<std::vector<float>>& rows) {
  VectorSet out;
  for (const auto& r : rows) out.append(r);
  return out;
}

void VectorSet::append(std::span<const float> row) {
  if (row.empty()) throw ContractViolation("vector set: empty vector");
  if (dim_ == 0) {
    dim_ = row.size();
  } else if (row.size() != dim_) {
    throw ContractViolation("vector set: vector of dim " + std::to_string(row.size()) +
                            " does not match dim " + std::to_string(dim_));
  }
  require_finite(row, "vector set");
  values_.insert(values_.end(), row.begin(), row.end());
}

// --- MultiVectorIndex -----------------------------------------------------

MultiVectorIndex::MultiVectorIndex(std::string doc_id, std::size_t dim,
                                   std::vector<PageEmbedding> pages, bool l2_normalized)
    : doc_id_(std::move(doc_id)), dim_(dim), pages_(std::move(pages)),
      l2_normalized_(l2_normalized) {
  if (pages_.empty()) throw ContractViolation("index must contain at least one page");
  if (dim_ == 0) throw ContractViolation("index dim must be positive");
  std::sort(pages_.begin(), pages_.end(),
            [](const PageEmbedding& a, const PageEmbedding& b) { return a.page_index < b.page_index; });
  for (std::size_t i = 0; i < pages_.size(); ++i) {
    const auto& p = pages_[i];
    if (p.page_index < 1) {
      throw ContractViolation("page_index must be >= 1, got " + std::to_string(p.page_index));
    }
    if (i > 0 && pages_[i - 1].page_index == p.page_index) {
      throw ContractViolation("duplicate page_index " + std::to_string(p.page_index));
    }
    if (p.vectors.empty()) {
      throw ContractViolation("page " + std::to_string(p.page_index) + " has no vectors");
    }
    if (p.vectors.dim() != dim_) {
      throw ContractViolation("page " + std::to_string(p.page_index) + " has dim " +
                              std::to_string(p.vectors.dim()) + ", index dim is " +
                              std::to_string(dim_));
    }
  }
}

std::size_t MultiVectorIndex::vector_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : pages_) n += p.vectors.size();
  return n;
}

// --- scoring ----------------------------------------------------------------

RelevanceScore score_page(const QueryEmbedding& query, const PageEmbedding& page) {
  if (query.empty()) throw ContractViolation("query embedding is empty");
  if (page.vectors.empty()) {
    throw ContractViolation("page " + std::to_string(page.page_index) + " has no vectors");
  }
  if (query.dim() != page.vectors.dim()) {
    throw ContractViolation("dimension mismatch: query dim " + std::to_string(query.dim()) +
                            " vs page dim " + std::to_string(page.vectors.dim()));
  }
  return {page.page_index, max_sim(query, page.vectors)};
}

std::vector<RelevanceScore> retrieve_top_k(const MultiVectorIndex& index,
                                           const QueryEmbedding& query, std::size_t k) {
  if (k == 0) throw ContractViolation("k must be >= 1");
  if (index.page_count() == 0) throw ContractViolation("empty index");
  if (query.empty()) throw ContractViolation("query embedding is empty");
  if (query.dim() != index.dim()) {
    throw ContractViolation("dimension mismatch: query dim " + std::to_string(query.dim()) +
                            " vs index dim " + std::to_string(index.dim()));
  }

  const auto& pages = index.pages();
  std::vector<RelevanceScore> scores(pages.size());
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) scores[i] = score_page(query, pages[i]);
  };

  // Each worker owns a disjoint slice of `scores`, so output does not depend
  // on scheduling.
  const std::size_t workers =
      pages.size() < kParallelPageThreshold
          ? 1
          : std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), 16);
  if (workers == 1) {
    score_range(0, pages.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (pages.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(pages.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(score_range, begin, end);
    }
  }

  const std::size_t take = std::min(k, scores.size());
  auto better = [](const RelevanceScore& a, const RelevanceScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.page_index < b.page_index;
  };
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(take),
                    scores.end(), better);
  scores.resize(take);
  return scores;
}

// --- binary codec -----------------------------------------------------------

void write_index(const MultiVectorIndex& index, std::ostream& out) {
  if (index.page_count() == 0) throw ContractViolation("cannot write an index with 0 pages");
  if (index.doc_id().size() > kMaxDocIdLen) throw ContractViolation("doc_id too long");

  out.write(kMagic, 4);
  put_u32(out, kIndexFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(index.dim()));
  put_u32(out, index.l2_normalized() ? kFlagL2Normalized : 0u);
  put_u32(out, static_cast<std::uint32_t>(index.doc_id().size()));
  out.write(index.doc_id().data(), static_cast<std::streamsize>(index.doc_id().size()));
  put_u32(out, static_cast<std::uint32_t>(index.page_count()));
  for (const auto& page : index.pages()) {
    put_u32(out, static_cast<std::uint32_t>(page.page_index));
    put_u32(out, static_cast<std::uint32_t>(page.vectors.size()));
    for (float v : page.vectors.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw IndexFileError(IndexFileError::Kind::kIo, "write failed");
}

void write_index(const MultiVectorIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IndexFileError(IndexFileError::Kind::kIo, "cannot open " + path.string());
  write_index(index, out);
}

MultiVectorIndex read_index(std::istream& in) {
  using Kind = IndexFileError::Kind;
  Reader r(in);

  char magic[4];
  r.read(magic, 4, Kind::kTruncated, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IndexFileError(Kind::kNotAnIndexFile, "not an index file (bad magic bytes)");
  }
  const auto version = r.u32(Kind::kTruncated, "version");
  if (version != kIndexFormatVersion) {
    throw IndexFileError(Kind::kVersionMismatch,
                         "unsupported index version " + std::to_string(version) +
                             " (expected " + std::to_string(kIndexFormatVersion) + ")");
  }
  const auto dim = r.u32(Kind::kTruncated, "dim");
  const auto flags = r.u32(Kind::kTruncated, "flags");
  const auto id_len = r.u32(Kind::kTruncated, "doc_id length");
  if (dim == 0) throw IndexFileError(Kind::kCorruptHeader, "corrupt header: dim is 0");
  if ((flags & ~kFlagL2Normalized) != 0) {
    throw IndexFileError(Kind::kCorruptHeader, "corrupt header: unknown flag bits");
  }
  if (id_len > kMaxDocIdLen) {
    throw IndexFileError(Kind::kCorruptHeader, "corrupt header: doc_id length out of range");
  }
  std::string doc_id(id_len, '\0');
  r.read(doc_id.data(), id_len, Kind::kTruncated, "doc_id");
  const auto page_count = r.u32(Kind::kTruncated, "page count");
  if (page_count == 0) throw IndexFileError(Kind::kCorruptHeader, "corrupt header: 0 pages");

  std::vector<PageEmbedding> pages;
  std::vector<unsigned char> buf;
  int prev_index = 0;
  for (std::uint32_t p = 0; p < page_count; ++p) {
    const auto page_index = r.u32(Kind::kTruncated, "page header");
    const auto n = r.u32(Kind::kTruncated, "page header");
    if (page_index == 0 || page_index > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) ||
        static_cast<int>(page_index) <= prev_index) {
      throw IndexFileError(Kind::kCorruptHeader,
                           "corrupt page record: page_index " + std::to_string(page_index) +
                               " out of order or invalid");
    }
    if (n == 0) {
      throw IndexFileError(Kind::kCorruptHeader,
                           "corrupt page record: page " + std::to_string(page_index) +
                               " has no vectors");
    }
    const std::size_t count = static_cast<std::size_t>(n) * dim;
    buf.resize(count * 4);
    r.read(buf.data(), buf.size(), Kind::kTruncated, "vector payload");
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = std::bit_cast<float>(decode_u32(buf.data() + 4 * i));
      if (!std::isfinite(values[i])) {
        throw IndexFileError(Kind::kCorruptHeader,
                             "corrupt payload: non-finite value on page " +
                                 std::to_string(page_index));
      }
    }
    pages.push_back({static_cast<int>(page_index), VectorSet(dim, std::move(values))});
    prev_index = static_cast<int>(page_index);
  }
  if (!r.at_eof()) throw IndexFileError(Kind::kCorruptHeader, "trailing bytes after last page");
  return MultiVectorIndex(std::move(doc_id), dim, std::move(pages),
                          (flags & kFlagL2Normalized) != 0);
}

MultiVectorIndex read_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexFileError(IndexFileError::Kind::kIo, "index not found: " + path.string());
  return read_index(in);
}

// --- JSON-lines interchange ---------------------------------------------------

MultiVectorIndex import_jsonl(std::istream& in, const std::string& fallback_doc_id) {
  using nlohmann::json;
  std::string doc_id = fallback_doc_id;
  bool normalized = false;
  std::size_t dim = 0;
  std::vector<PageEmbedding> pages;
  std::set<int> seen;

  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> ContractViolation {
    return ContractViolation("line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw fail("expected a JSON object");

    if (!obj.contains("page_index")) {
      if (!pages.empty()) throw fail("header line must precede page lines");
      for (const auto& [key, value] : obj.items()) {
        if (key == "doc_id" && value.is_string()) {
          doc_id = value.get<std::string>();
        } else if (key == "l2_normalized" && value.is_boolean()) {
          normalized = value.get<bool>();
        } else {
          throw fail("unknown or mistyped header key '" + key + "'");
        }
      }
      continue;
    }

    const auto& idx = obj["page_index"];
    if (!idx.is_number_integer() || idx.get<long long>() < 1 ||
        idx.get<long long>() > std::numeric_limits<int>::max()) {
      throw fail("page_index must be a positive integer");
    }
    const int page_index = idx.get<int>();
    if (!seen.insert(page_index).second) {
      throw fail("duplicate page_index " + std::to_string(page_index));
    }
    if (!obj.contains("vectors") || !obj["vectors"].is_array() || obj["vectors"].empty()) {
      throw fail("vectors must be a nonempty array of float arrays");
    }
    for (const auto& [key, _] : obj.items()) {
      if (key != "page_index" && key != "vectors") throw fail("unknown key '" + key + "'");
    }

    VectorSet vs;
    for (const auto& row : obj["vectors"]) {
      if (!row.is_array() || row.empty()) throw fail("each vector must be a nonempty array");
      std::vector<float> values;
      values.reserve(row.size());
      for (const auto& x : row) {
        if (!x.is_number()) throw fail("vector entries must be numbers");
        const double d = x.get<double>();
        if (!std::isfinite(static_cast<float>(d))) throw fail("non-finite vector entry");
        values.push_back(static_cast<float>(d));
      }
      if (dim == 0) dim = values.size();
      if (values.size() != dim) {
        throw fail("dim mismatch: vector has " + std::to_string(values.size()) +
                   " entries, expected " + std::to_string(dim));
      }
      vs.append(values);
    }
    pages.push_back({page_index, std::move(vs)});
  }
  if (pages.empty()) throw ContractViolation("import contains no pages");
  return MultiVectorIndex(std::move(doc_id), dim, std::move(pages), normalized);
}

MultiVectorIndex import_jsonl(const std::filesystem::path& path,
                              const std::string& fallback_doc_id) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open import file " + path.string());
  return import_jsonl(in, fallback_doc_id);
}

void export_jsonl(const MultiVectorIndex& index, std::ostream& out) {
  using nlohmann::json;
  out << json{{"doc_id", index.doc_id()}, {"l2_normalized", index.l2_normalized()}}.dump()
      << '\n';
  for (const auto& page : index.pages()) {
    json rows = json::array();
    for (std::size_t j = 0; j < page.vectors.size(); ++j) {
      const auto r = page.vectors.row(j);
      rows.push_back(std::vector<float>(r.begin(), r.end()));
    }
    out << json{{"page_index", page.page_index}, {"vectors", std::move(rows)}}.dump() << '\n';
  }
}

}  // namespace evidoc
