// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <algorithm>
#include <cstdio>
#include <thread>

#include <spdlog/spdlog.h>

#include "evidoc/errors.hpp"
#include "evidoc/model_gateway.hpp"

namespace evidoc {

std::string_view to_string(ModelClass c) {
  return c == ModelClass::kOrdinary ? "ordinary" : "reasoning";
}

ModelClass model_class_from_string(std::string_view s) {
  if (s == "ordinary") return ModelClass::kOrdinary;
  if (s == "reasoning") return ModelClass::kReasoning;
  throw ConfigError("unknown model class '" + std::string(s) + "'");
}

std::string request_fingerprint(const ChatRequest& request) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  mix(to_string(request.model_class));
  for (const auto& t : request.text_parts) {
    mix("\x1e");
    mix(t);
  }
  for (const auto& img : request.image_parts) {
    mix("\x1d");
    mix(img.uri);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Gateway::Gateway(GatewayConfig config, std::shared_ptr<Backend> backend)
    : config_(std::move(config)), backend_(std::move(backend)),
      slots_(std::max(1, config_.concurrency)) {
  if (!backend_) throw ConfigError("gateway requires a backend");
  if (config_.retries < 0) throw ConfigError("retries must be >= 0");
  if (config_.temperature < 0.0 || config_.temperature > 2.0) {
    throw ConfigError("temperature must lie in [0, 2]");
  }
  if (config_.max_output < 1) throw ConfigError("max_output must be positive");
}

const EndpointConfig& Gateway::resolve(ModelClass model_class) const {
  const auto& ep = model_class == ModelClass::kOrdinary ? config_.ordinary : config_.reasoning;
  if (!ep) {
    throw ConfigError("no backend configured for model class '" +
                      std::string(to_string(model_class)) + "'");
  }
  return *ep;
}

ChatResponse Gateway::complete(ChatRequest request) {
  if (request.text_parts.empty()) throw ContractViolation("chat request needs a text part");
  const auto& endpoint = resolve(request.model_class);
  if (!request.temperature) request.temperature = config_.temperature;
  if (*request.temperature < 0.0 || *request.temperature > 2.0) {
    throw ContractViolation("temperature must lie in [0, 2]");
  }
  if (!request.max_output) request.max_output = config_.max_output;
  if (*request.max_output < 1) throw ContractViolation("max_output must be positive");

  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};

  std::vector<std::string> attempts;
  const int max_attempts = config_.retries + 1;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    try {
      ChatResponse resp = backend_->send(request, endpoint);
      resp.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      return resp;
    } catch (const TransportError& e) {
      attempts.push_back("attempt " + std::to_string(attempt + 1) + ": " + e.what());
      spdlog::warn("{} ({}): transport failure on attempt {}/{}: {}", request.purpose,
                   to_string(request.model_class), attempt + 1, max_attempts, e.what());
      if (attempt + 1 < max_attempts && config_.backoff.count() > 0) {
        std::this_thread::sleep_for(config_.backoff * (1 << attempt));
      }
    } catch (const BackendError& e) {
      auto log = e.attempts();
      attempts.insert(attempts.end(), log.begin(), log.end());
      attempts.push_back("attempt " + std::to_string(attempt + 1) + ": " + e.what());
      throw BackendError(e.what(), std::move(attempts));
    }
  }
  throw BackendError("backend failed after " + std::to_string(max_attempts) + " attempts",
                     std::move(attempts));
}

}  // namespace evidoc
