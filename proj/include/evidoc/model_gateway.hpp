// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace evidoc {

/// Ordinary = instruct-type model; Reasoning = thinking-type model.
enum class ModelClass { kOrdinary, kReasoning };

std::string_view to_string(ModelClass c);
ModelClass model_class_from_string(std::string_view s);

inline constexpr double kDefaultTemperature = 0.1;

/// Reference to a pre-rendered page image: a local file path, an http(s) URL
/// or a data URI.
struct ImageRef {
  int page = 0;
  std::string uri;

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct ChatRequest {
  ModelClass model_class = ModelClass::kOrdinary;
  std::vector<std::string> text_parts;
  std::vector<ImageRef> image_parts;
  std::optional<double> temperature;  // gateway default when unset
  std::optional<int> max_output;      // gateway default when unset

  // Routing metadata. Never sent to a real backend; the mock matches on it and
  // logs carry it.
  std::string purpose;
  std::optional<int> page;
};

struct ChatResponse {
  std::string text;
  std::string backend_id;
  std::int64_t latency_ms = 0;
};

/// Stable 64-bit FNV-1a fingerprint of the request content (class, text, images),
/// as 16 lowercase hex digits.
std::string request_fingerprint(const ChatRequest& request);

struct EndpointConfig {
  std::string url;
  std::string model;
  std::string api_key_env;  // name of the env var holding the key; may be empty

  friend bool operator==(const EndpointConfig&, const EndpointConfig&) = default;
};

struct GatewayConfig {
  std::optional<EndpointConfig> ordinary;
  std::optional<EndpointConfig> reasoning;
  double temperature = kDefaultTemperature;
  int max_output = 1024;
  int concurrency = 4;
  int retries = 2;
  std::chrono::milliseconds backoff{500};
};

class Backend {
 public:
  virtual ~Backend() = default;

  /// One attempt. Throw TransportError for retryable faults, BackendError for
  /// permanent ones. `request` arrives with temperature and max_output filled in.
  virtual ChatResponse send(const ChatRequest& request, const EndpointConfig& endpoint) = 0;
};

/// Chat-completions style HTTP transport with inline base64 images.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(std::chrono::seconds timeout = std::chrono::seconds(300));
  ChatResponse send(const ChatRequest& request, const EndpointConfig& endpoint) override;

  /// Request body as sent on the wire (exposed for tests).
  static nlohmann::json build_body(const ChatRequest& request, const EndpointConfig& endpoint);

 private:
  std::chrono::seconds timeout_;
};

/// Deterministic scripted backend.
///
/// Script format (JSON):
///   {
///     "fingerprints": {"<hex>": "reply", ...},
///     "rules": [{"purpose": "...", "page": 3, "model_class": "reasoning",
///                "contains": "...", "reply": "...", "transport_failures": 0}, ...],
///     "sequence": ["reply", ...],
///     "default": "reply"
///   }
/// Lookup order: exact fingerprint, first matching rule, next sequence entry,
/// default. Every key is optional. Fingerprints and rules are independent of
/// scheduling; `sequence` is only deterministic with concurrency 1.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(const nlohmann::json& script);
  static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);

  ChatResponse send(const ChatRequest& request, const EndpointConfig& endpoint) override;

  std::vector<ChatRequest> captured() const;
  std::size_t call_count() const;

 private:
  struct Rule {
    std::optional<std::string> purpose;
    std::optional<int> page;
    std::optional<ModelClass> model_class;
    std::optional<std::string> contains;
    std::string reply;
    int transport_failures = 0;
  };

  std::optional<std::string> lookup(const ChatRequest& request);

  std::map<std::string, std::string> fingerprints_;
  std::vector<Rule> rules_;
  std::vector<int> rule_failures_left_;
  std::vector<std::string> sequence_;
  std::size_t next_sequence_ = 0;
  std::optional<std::string> default_reply_;

  mutable std::mutex mu_;
  std::vector<ChatRequest> captured_;
};

/// Uniform entry point used by every agent. Thread-safe.
class Gateway {
 public:
  Gateway(GatewayConfig config, std::shared_ptr<Backend> backend);

  ChatResponse complete(ChatRequest request);

  /// Endpoint serving a model class; ConfigError when unconfigured.
  const EndpointConfig& resolve(ModelClass model_class) const;

  const GatewayConfig& config() const noexcept { return config_; }

 private:
  GatewayConfig config_;
  std::shared_ptr<Backend> backend_;
  std::counting_semaphore<> slots_;
};

/// Pulls the first balanced top-level JSON object out of model output.
///
/// Repair steps, in order: strip a ``` fence, scan for a balanced {...} span
/// (string-aware), drop trailing commas before } or ]. The result is then
/// parsed strictly. Throws ProtocolError carrying the raw text on failure.
nlohmann::json extract_json_object(std::string_view text);

}  // namespace evidoc
