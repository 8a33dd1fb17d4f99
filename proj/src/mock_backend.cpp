// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <fstream>

#include "evidoc/errors.hpp"
#include "evidoc/model_gateway.hpp"

namespace evidoc {

namespace {

bool rule_key_known(const std::string& key) {
  return key == "purpose" || key == "page" || key == "model_class" || key == "contains" ||
         key == "reply" || key == "transport_failures";
}

}  // namespace

MockBackend::MockBackend(const nlohmann::json& script) {
  if (!script.is_object()) throw ConfigError("mock script must be a JSON object");
  for (const auto& [key, value] : script.items()) {
    if (key == "fingerprints") {
      for (const auto& [fp, reply] : value.items()) fingerprints_[fp] = reply.get<std::string>();
    } else if (key == "rules") {
      for (const auto& r : value) {
        Rule rule;
        for (const auto& [rk, _] : r.items()) {
          if (!rule_key_known(rk)) throw ConfigError("mock script: unknown rule key '" + rk + "'");
        }
        if (!r.contains("reply")) throw ConfigError("mock script: rule without reply");
        rule.reply = r.at("reply").get<std::string>();
        if (r.contains("purpose")) rule.purpose = r["purpose"].get<std::string>();
        if (r.contains("page")) rule.page = r["page"].get<int>();
        if (r.contains("model_class")) {
          rule.model_class = model_class_from_string(r["model_class"].get<std::string>());
        }
        if (r.contains("contains")) rule.contains = r["contains"].get<std::string>();
        if (r.contains("transport_failures")) {
          rule.transport_failures = r["transport_failures"].get<int>();
        }
        rules_.push_back(std::move(rule));
        rule_failures_left_.push_back(rules_.back().transport_failures);
      }
    } else if (key == "sequence") {
      sequence_ = value.get<std::vector<std::string>>();
    } else if (key == "default") {
      default_reply_ = value.get<std::string>();
    } else {
      throw ConfigError("mock script: unknown key '" + key + "'");
    }
  }
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mock script " + path.string());
  nlohmann::json script;
  try {
    script = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("mock script " + path.string() + ": " + e.what());
  }
  return std::make_shared<MockBackend>(script);
}

std::optional<std::string> MockBackend::lookup(const ChatRequest& request) {
  if (!fingerprints_.empty()) {
    if (auto it = fingerprints_.find(request_fingerprint(request)); it != fingerprints_.end()) {
      return it->second;
    }
  }
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    if (r.purpose && *r.purpose != request.purpose) continue;
    if (r.page && (!request.page || *r.page != *request.page)) continue;
    if (r.model_class && *r.model_class != request.model_class) continue;
    if (r.contains) {
      bool found = false;
      for (const auto& t : request.text_parts) found = found || t.find(*r.contains) != std::string::npos;
      if (!found) continue;
    }
    if (rule_failures_left_[i] > 0) {
      --rule_failures_left_[i];
      throw TransportError("mock: scripted transport failure");
    }
    return r.reply;
  }
  if (next_sequence_ < sequence_.size()) return sequence_[next_sequence_++];
  return default_reply_;
}

ChatResponse MockBackend::send(const ChatRequest& request, const EndpointConfig& endpoint) {
  std::lock_guard lock(mu_);
  captured_.push_back(request);
  auto reply = lookup(request);
  if (!reply) {
    throw BackendError("mock: no scripted reply for " + request.purpose +
                           (request.page ? " page " + std::to_string(*request.page) : "") +
                           " (fingerprint " + request_fingerprint(request) + ")",
                       {});
  }
  return {*reply, "mock:" + endpoint.model, 0};
}

std::vector<ChatRequest> MockBackend::captured() const {
  std::lock_guard lock(mu_);
  return captured_;
}

std::size_t MockBackend::call_count() const {
  std::lock_guard lock(mu_);
  return captured_.size();
}

}  // namespace evidoc
