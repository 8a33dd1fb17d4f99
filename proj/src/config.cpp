// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>

#include "evidoc/errors.hpp"
#include "evidoc/prompts.hpp"

namespace evidoc {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown config key '" + where + "." + key + "'");
  }
}

json interpolate_all(const json& j) {
  if (j.is_string()) return interpolate_env(j.get<std::string>());
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items()) out[k] = interpolate_all(v);
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(interpolate_all(v));
    return out;
  }
  return j;
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
  }
}

std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

EndpointConfig parse_endpoint(const json& j, const std::string& where) {
  reject_unknown(j, where, {"endpoint", "model", "api_key_env"});
  EndpointConfig ep;
  ep.url = get<std::string>(j, "endpoint", where, "");
  ep.model = get<std::string>(j, "model", where, "");
  ep.api_key_env = get<std::string>(j, "api_key_env", where, "");
  if (ep.url.empty()) throw ConfigError(where + ".endpoint is required");
  if (ep.model.empty()) throw ConfigError(where + ".model is required");
  return ep;
}

}  // namespace

std::string interpolate_env(const std::string& s) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = s.find("${", pos);
    if (open == std::string::npos) break;
    const auto close = s.find('}', open + 2);
    if (close == std::string::npos) throw ConfigError("unterminated ${ in '" + s + "'");
    const auto name = s.substr(open + 2, close - open - 2);
    const char* value = std::getenv(name.c_str());
    if (!value) throw ConfigError("environment variable " + name + " is not set");
    out += s.substr(pos, open - pos);
    out += value;
    pos = close + 1;
  }
  return out + s.substr(pos);
}

PipelineConfig parse_config(const json& raw, const std::filesystem::path& base_dir) {
  reject_unknown(raw, "config",
                 {"retriever", "backends", "prompts", "pages", "temperature", "max_output",
                  "concurrency", "retries", "backoff_ms", "run_dir", "eval"});
  const json j = interpolate_all(raw);
  PipelineConfig c;
  c.source = raw;

  if (!j.contains("retriever")) throw ConfigError("config.retriever is required");
  const auto& r = j["retriever"];
  reject_unknown(r, "retriever", {"index_path", "k", "query_embeddings", "encoder_url"});
  c.retriever.index_path = resolve_path(get<std::string>(r, "index_path", "retriever", ""), base_dir);
  if (c.retriever.index_path.empty()) throw ConfigError("retriever.index_path is required");
  const auto k = get<long long>(r, "k", "retriever", 5);
  if (k < 1) throw ConfigError("retriever.k must be >= 1");
  c.retriever.k = static_cast<std::size_t>(k);
  c.retriever.query_embeddings =
      resolve_path(get<std::string>(r, "query_embeddings", "retriever", ""), base_dir);
  c.retriever.encoder_url = get<std::string>(r, "encoder_url", "retriever", "");

  if (!j.contains("backends")) throw ConfigError("config.backends is required");
  const auto& b = j["backends"];
  reject_unknown(b, "backends", {"ordinary", "reasoning"});
  if (!b.contains("ordinary")) throw ConfigError("backends.ordinary is required");
  c.gateway.ordinary = parse_endpoint(b["ordinary"], "backends.ordinary");
  if (!b.contains("reasoning")) {
    throw ConfigError("backends.reasoning is required (use \"ordinary\" to alias it)");
  }
  if (b["reasoning"].is_string()) {
    if (b["reasoning"].get<std::string>() != "ordinary") {
      throw ConfigError("backends.reasoning may only alias \"ordinary\"");
    }
    c.gateway.reasoning = c.gateway.ordinary;
  } else {
    c.gateway.reasoning = parse_endpoint(b["reasoning"], "backends.reasoning");
  }

  c.gateway.temperature = get<double>(j, "temperature", "config", kDefaultTemperature);
  if (c.gateway.temperature < 0.0 || c.gateway.temperature > 2.0) {
    throw ConfigError("temperature must lie in [0, 2]");
  }
  c.gateway.max_output = get<int>(j, "max_output", "config", 1024);
  c.gateway.concurrency = get<int>(j, "concurrency", "config", 4);
  c.gateway.retries = get<int>(j, "retries", "config", 2);
  c.gateway.backoff = std::chrono::milliseconds(get<int>(j, "backoff_ms", "config", 500));
  if (c.gateway.max_output < 1) throw ConfigError("max_output must be >= 1");
  if (c.gateway.concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (c.gateway.retries < 0) throw ConfigError("retries must be >= 0");

  c.prompts_dir = resolve_path(get<std::string>(j, "prompts", "config", ""), base_dir);
  if (j.contains("pages")) {
    reject_unknown(j["pages"], "pages", {"image_path"});
    c.image_path = resolve_path(get<std::string>(j["pages"], "image_path", "pages", ""), base_dir);
  }
  if (c.image_path.empty()) throw ConfigError("pages.image_path is required");
  c.run_dir = resolve_path(get<std::string>(j, "run_dir", "config", "runs"), base_dir);

  if (j.contains("eval")) {
    const auto& e = j["eval"];
    reject_unknown(e, "eval", {"float_tolerance", "unanswerable_markers", "concurrency", "judge"});
    c.scoring.float_tolerance = get<double>(e, "float_tolerance", "eval", 0.01);
    c.scoring.unanswerable_markers = get<std::vector<std::string>>(
        e, "unanswerable_markers", "eval", c.scoring.unanswerable_markers);
    c.eval_concurrency = get<int>(e, "concurrency", "eval", 1);
    c.judge = get<bool>(e, "judge", "eval", false);
    if (c.scoring.float_tolerance < 0.0) throw ConfigError("eval.float_tolerance must be >= 0");
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

std::filesystem::path PipelineConfig::index_path_for(const std::string& doc_id) const {
  return render_template(retriever.index_path, {{"doc_id", doc_id}});
}

std::string PipelineConfig::image_path_for(const std::string& doc_id, int page) const {
  return render_template(image_path, {{"doc_id", doc_id}, {"page", std::to_string(page)}});
}

}  // namespace evidoc
