// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <httplib.h>

#include "evidoc/query_encoder.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "evidoc/errors.hpp"

namespace evidoc {

namespace {

QueryEmbedding vectors_from_json(const nlohmann::json& j) {
  const auto& rows = j.is_object() ? j.at("vectors") : j;
  if (!rows.is_array() || rows.empty()) throw ContractViolation("query vectors must be a nonempty array");
  return VectorSet::from_rows(rows.get<std::vector<std::vector<float>>>());
}

}  // namespace

FileQueryEncoder::FileQueryEncoder(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open query embeddings " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      auto q = vectors_from_json(j);
      if (j.contains("question_id")) by_id_[j["question_id"].get<std::string>()] = q;
      if (j.contains("question")) by_text_[j["question"].get<std::string>()] = q;
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

QueryEmbedding FileQueryEncoder::encode(const std::string& question,
                                        const std::string& question_id) {
  if (!question_id.empty()) {
    if (auto it = by_id_.find(question_id); it != by_id_.end()) return it->second;
  }
  if (auto it = by_text_.find(question); it != by_text_.end()) return it->second;
  throw Error("no precomputed query embedding for question " +
              (question_id.empty() ? "'" + question + "'" : question_id));
}

HttpQueryEncoder::HttpQueryEncoder(std::string url) : url_(std::move(url)) {}

QueryEmbedding HttpQueryEncoder::encode(const std::string& question, const std::string&) {
  const auto scheme_end = url_.find("://");
  const auto path_start =
      scheme_end == std::string::npos ? std::string::npos : url_.find('/', scheme_end + 3);
  const auto origin = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  const auto path = path_start == std::string::npos ? std::string("/") : url_.substr(path_start);

  httplib::Client client(origin);
  const auto res =
      client.Post(path, nlohmann::json{{"text", question}}.dump(), "application/json");
  if (!res) throw Error("query encoder unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("query encoder returned HTTP " + std::to_string(res->status));
  return vectors_from_json(nlohmann::json::parse(res->body));
}

QueryEmbedding read_query_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open query vectors " + path.string());
  try {
    return vectors_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace evidoc
