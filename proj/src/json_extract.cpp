// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/errors.hpp"
#include "evidoc/model_gateway.hpp"

namespace evidoc {

namespace {

// Body of the first ``` fenced block that holds a '{', else the input.
std::string_view strip_fence(std::string_view text) {
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) return text;
    const auto body = text.find('\n', open + 3);
    if (body == std::string_view::npos) return text;
    const auto close = text.find("```", body + 1);
    if (close == std::string_view::npos) return text.substr(body + 1);
    auto inner = text.substr(body + 1, close - body - 1);
    if (inner.find('{') != std::string_view::npos) return inner;
    pos = close + 3;
  }
}

// Index one past the '}' matching text[start], or npos if it never closes.
std::size_t balanced_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
      if (depth < 0) return std::string_view::npos;
    }
  }
  return std::string_view::npos;
}

std::string drop_trailing_commas(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out += c;
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      auto j = text.find_first_not_of(" \t\r\n", i + 1);
      if (j != std::string_view::npos && (text[j] == '}' || text[j] == ']')) continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

nlohmann::json extract_json_object(std::string_view text) {
  const auto body = strip_fence(text);
  std::size_t pos = 0;
  std::string last_error = "no JSON object found";
  while ((pos = body.find('{', pos)) != std::string_view::npos) {
    const auto end = balanced_end(body, pos);
    if (end == std::string_view::npos) {
      throw ProtocolError("unbalanced JSON object in model output", std::string(text));
    }
    const auto repaired = drop_trailing_commas(body.substr(pos, end - pos));
    auto parsed = nlohmann::json::parse(repaired, nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    last_error = "balanced span is not valid JSON after repair";
    pos = end;
  }
  throw ProtocolError(last_error, std::string(text));
}

}  // namespace evidoc
