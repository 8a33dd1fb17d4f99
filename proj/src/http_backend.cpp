// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <httplib.h>

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evidoc/errors.hpp"
#include "evidoc/model_gateway.hpp"

namespace evidoc {

namespace {

std::string base64(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string mime_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  if (ext == ".gif") return "image/gif";
  return "image/png";
}

std::string image_url(const ImageRef& img) {
  const auto& uri = img.uri;
  if (uri.starts_with("http://") || uri.starts_with("https://") || uri.starts_with("data:")) {
    return uri;
  }
  std::ifstream in(uri, std::ios::binary);
  if (!in) throw BackendError("page image not found: " + uri, {});
  std::ostringstream ss;
  ss << in.rdbuf();
  return "data:" + mime_for(uri) + ";base64," + base64(ss.str());
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string response_text(const nlohmann::json& body) {
  const auto& content = body.at("choices").at(0).at("message").at("content");
  if (content.is_string()) return content.get<std::string>();
  if (content.is_null()) return {};
  std::string text;
  for (const auto& part : content) {
    if (part.value("type", "") == "text") text += part.value("text", "");
  }
  return text;
}

}  // namespace

HttpBackend::HttpBackend(std::chrono::seconds timeout) : timeout_(timeout) {}

nlohmann::json HttpBackend::build_body(const ChatRequest& request, const EndpointConfig& endpoint) {
  nlohmann::json content = nlohmann::json::array();
  for (const auto& t : request.text_parts) content.push_back({{"type", "text"}, {"text", t}});
  for (const auto& img : request.image_parts) {
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_url(img)}}}});
  }
  nlohmann::json body = {
      {"model", endpoint.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::move(content)}}})},
  };
  if (request.temperature) body["temperature"] = *request.temperature;
  if (request.max_output) body["max_tokens"] = *request.max_output;
  return body;
}

ChatResponse HttpBackend::send(const ChatRequest& request, const EndpointConfig& endpoint) {
  const auto [origin, path] = split_url(endpoint.url);
  httplib::Client client(origin);
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(timeout_);

  httplib::Headers headers;
  if (!endpoint.api_key_env.empty()) {
    const char* key = std::getenv(endpoint.api_key_env.c_str());
    if (!key || !*key) throw ConfigError("environment variable " + endpoint.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto body = build_body(request, endpoint).dump();
  auto res = client.Post(path, headers, body, "application/json");
  if (!res) throw TransportError("HTTP request failed: " + httplib::to_string(res.error()));
  if (res->status == 408 || res->status == 429 || res->status >= 500) {
    throw TransportError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 512), {});
  }
  try {
    return {response_text(nlohmann::json::parse(res->body)), "http:" + endpoint.model, 0};
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat-completions response: ") + e.what(), {});
  }
}

}  // namespace evidoc
