// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <httplib.h>
#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "evidoc/errors.hpp"
#include "evidoc/fanout.hpp"
#include "evidoc/model_gateway.hpp"
#include "evidoc/prompts.hpp"
#include "test_support.hpp"

using namespace evidoc;
using nlohmann::json;
using evidoc::testing::mock_gateway_config;

namespace {

ChatRequest text_request(std::string text, ModelClass c = ModelClass::kOrdinary) {
  ChatRequest r;
  r.model_class = c;
  r.text_parts = {std::move(text)};
  r.purpose = "test";
  return r;
}

// Local chat-completions server that fails the first `failures` calls with `status`.
class FakeServer {
 public:
  FakeServer(int failures, int status) : failures_(failures), status_(status) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = hits_++;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      if (n < failures_) {
        res.status = status_;
        res.set_content("busy", "text/plain");
        return;
      }
      const json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int hits() const { return hits_; }
  json last_body() const { return json::parse(last_body_); }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int failures_;
  int status_;
  std::atomic<int> hits_{0};
  std::string last_body_;
  std::string last_auth_;
};

GatewayConfig http_config(const std::string& url, int retries) {
  GatewayConfig c;
  c.ordinary = EndpointConfig{url, "instruct-model", ""};
  c.reasoning = EndpointConfig{url, "thinking-model", ""};
  c.retries = retries;
  c.backoff = std::chrono::milliseconds(1);
  return c;
}

}  // namespace

TEST(ExtractJson, FencedBlock) {
  EXPECT_EQ(extract_json_object("```json\n{\"a\":1}\n```"), json({{"a", 1}}));
}

TEST(ExtractJson, ProseAndTrailingCommas) {
  EXPECT_EQ(extract_json_object("Sure! {\"a\": [1,2,],} thanks"), json({{"a", {1, 2}}}));
}

TEST(ExtractJson, NoObjectIsProtocolErrorWithRawText) {
  try {
    extract_json_object("no braces here");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.raw_text(), "no braces here");
  }
  EXPECT_THROW(extract_json_object("{\"a\": 1"), ProtocolError);
  EXPECT_THROW(extract_json_object("{a: 1}"), ProtocolError);
}

TEST(ExtractJson, BracesInsideStringsDoNotConfuseTheScan) {
  const auto j = extract_json_object(R"(x {"s": "a } b, ]", "t": "q\"}"} y)");
  EXPECT_EQ(j["s"], "a } b, ]");
  EXPECT_EQ(j["t"], "q\"}");
}

TEST(ExtractJson, CommaInsideStringIsKept) {
  EXPECT_EQ(extract_json_object(R"({"s": "a,}"})")["s"], "a,}");
}

TEST(ExtractJson, SkipsInvalidSpanAndTakesNextObject) {
  EXPECT_EQ(extract_json_object("{not json} then {\"b\": 2}"), json({{"b", 2}}));
}

TEST(ExtractJson, IdempotentOnValidJson) {
  const json obj = {{"x", {1, 2, 3}}, {"y", {{"z", "w"}}}};
  const auto once = extract_json_object(obj.dump());
  EXPECT_EQ(once, obj);
  EXPECT_EQ(extract_json_object(once.dump(2)), obj);
}

TEST(Gateway, DefaultsTemperatureAndMaxOutput) {
  evidoc::testing::MockRig rig(json{{"default", "OK"}});
  EXPECT_EQ(rig.gateway.complete(text_request("hi")).text, "OK");
  const auto sent = rig.backend->captured().at(0);
  EXPECT_DOUBLE_EQ(*sent.temperature, 0.1);
  EXPECT_EQ(*sent.max_output, 1024);
}

TEST(Gateway, ClassResolvesToConfiguredEndpoint) {
  evidoc::testing::MockRig rig(json{{"default", "OK"}});
  const std::map<ModelClass, std::string> expected = {
      {ModelClass::kOrdinary, "instruct-model"}, {ModelClass::kReasoning, "thinking-model"}};
  for (const auto& [cls, model] : expected) {
    EXPECT_EQ(rig.gateway.resolve(cls).model, model);
    EXPECT_EQ(rig.gateway.complete(text_request("q", cls)).backend_id, "mock:" + model);
  }
}

TEST(Gateway, UnconfiguredClassIsConfigError) {
  auto cfg = mock_gateway_config();
  cfg.reasoning.reset();
  Gateway g(cfg, std::make_shared<MockBackend>(json{{"default", "OK"}}));
  EXPECT_THROW(g.complete(text_request("q", ModelClass::kReasoning)), ConfigError);
  EXPECT_EQ(g.complete(text_request("q")).text, "OK");
}

TEST(Gateway, RejectsBadRequests) {
  evidoc::testing::MockRig rig(json{{"default", "OK"}});
  ChatRequest empty;
  EXPECT_THROW(rig.gateway.complete(empty), ContractViolation);
  auto hot = text_request("q");
  hot.temperature = 2.5;
  EXPECT_THROW(rig.gateway.complete(hot), ContractViolation);
}

TEST(Gateway, RetriesTransportFailuresUpToLimit) {
  auto cfg = mock_gateway_config();
  cfg.retries = 2;
  auto flaky = std::make_shared<MockBackend>(
      json{{"rules", {{{"purpose", "test"}, {"reply", "fine"}, {"transport_failures", 2}}}}});
  Gateway g(cfg, flaky);
  EXPECT_EQ(g.complete(text_request("q")).text, "fine");
  EXPECT_EQ(flaky->call_count(), 3u);

  auto dead = std::make_shared<MockBackend>(
      json{{"rules", {{{"purpose", "test"}, {"reply", "x"}, {"transport_failures", 5}}}}});
  Gateway g2(cfg, dead);
  try {
    g2.complete(text_request("q"));
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.attempts().size(), 3u);
  }
  EXPECT_EQ(dead->call_count(), 3u);
}

TEST(MockBackend, LookupOrder) {
  const auto req = text_request("alpha beta");
  const json script = {
      {"fingerprints", {{request_fingerprint(req), "by-fingerprint"}}},
      {"rules", {{{"contains", "beta"}, {"reply", "by-rule"}}}},
      {"sequence", {"first", "second"}},
      {"default", "fallback"}};
  evidoc::testing::MockRig rig(script);
  EXPECT_EQ(rig.gateway.complete(req).text, "by-fingerprint");
  EXPECT_EQ(rig.gateway.complete(text_request("gamma beta")).text, "by-rule");
  EXPECT_EQ(rig.gateway.complete(text_request("x")).text, "first");
  EXPECT_EQ(rig.gateway.complete(text_request("x")).text, "second");
  EXPECT_EQ(rig.gateway.complete(text_request("x")).text, "fallback");
}

TEST(MockBackend, RulesMatchPageAndClass) {
  const json script = {{"rules",
                        {{{"page", 3}, {"reply", "three"}},
                         {{"model_class", "reasoning"}, {"reply", "think"}}}}};
  evidoc::testing::MockRig rig(script);
  auto r = text_request("q");
  r.page = 3;
  EXPECT_EQ(rig.gateway.complete(r).text, "three");
  EXPECT_EQ(rig.gateway.complete(text_request("q", ModelClass::kReasoning)).text, "think");
  EXPECT_THROW(rig.gateway.complete(text_request("q")), BackendError);
}

TEST(MockBackend, UnknownScriptKeysRejected) {
  EXPECT_THROW(MockBackend(json{{"rulez", json::array()}}), ConfigError);
  EXPECT_THROW(MockBackend(json{{"rules", {{{"reply", "x"}, {"pg", 1}}}}}), ConfigError);
}

TEST(MockBackend, SameRequestsSameRepliesUnderConcurrency) {
  const json script = {{"rules",
                        {{{"contains", "a"}, {"reply", "A"}}, {{"contains", "b"}, {"reply", "B"}}}}};
  evidoc::testing::MockRig rig(script, 8);
  std::vector<std::string> got(64);
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < got.size(); ++i) {
    tasks.emplace_back([&, i] { got[i] = rig.gateway.complete(text_request(i % 2 ? "a" : "b")).text; });
  }
  run_tasks(tasks, 8);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], i % 2 ? "A" : "B");
}

TEST(Fingerprint, SensitiveToContent) {
  auto a = text_request("q");
  auto b = text_request("q");
  EXPECT_EQ(request_fingerprint(a), request_fingerprint(b));
  b.image_parts.push_back({1, "p1.png"});
  EXPECT_NE(request_fingerprint(a), request_fingerprint(b));
  EXPECT_NE(request_fingerprint(a), request_fingerprint(text_request("q", ModelClass::kReasoning)));
  EXPECT_EQ(request_fingerprint(a).size(), 16u);
}

TEST(HttpBackend, BodyCarriesTextImagesAndSampling) {
  ChatRequest r = text_request("describe");
  r.image_parts.push_back({2, "https://example.org/p2.png"});
  r.temperature = 0.1;
  r.max_output = 64;
  const auto body = HttpBackend::build_body(r, {"http://x/v1", "m", ""});
  EXPECT_EQ(body["model"], "m");
  const auto& content = body["messages"][0]["content"];
  ASSERT_EQ(content.size(), 2u);
  EXPECT_EQ(content[0]["text"], "describe");
  EXPECT_EQ(content[1]["image_url"]["url"], "https://example.org/p2.png");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.1);
  EXPECT_EQ(body["max_tokens"], 64);
}

TEST(HttpBackend, LocalImagesAreInlinedAsBase64) {
  evidoc::testing::TempDir dir;
  {
    std::ofstream out(dir / "p.png", std::ios::binary);
    out << "abc";
  }
  ChatRequest r = text_request("x");
  r.image_parts.push_back({1, (dir / "p.png").string()});
  const auto body = HttpBackend::build_body(r, {"http://x/v1", "m", ""});
  EXPECT_EQ(body["messages"][0]["content"][1]["image_url"]["url"], "data:image/png;base64,YWJj");
}

TEST(HttpBackend, RetriesServerErrorsThenSucceeds) {
  FakeServer server(2, 503);
  Gateway g(http_config(server.url(), 2), std::make_shared<HttpBackend>());
  const auto resp = g.complete(text_request("ping"));
  EXPECT_EQ(resp.text, "pong");
  EXPECT_EQ(resp.backend_id, "http:instruct-model");
  EXPECT_EQ(server.hits(), 3);
  EXPECT_EQ(server.last_body()["model"], "instruct-model");
}

TEST(HttpBackend, GivesUpAfterRetries) {
  FakeServer server(10, 429);
  Gateway g(http_config(server.url(), 1), std::make_shared<HttpBackend>());
  EXPECT_THROW(g.complete(text_request("ping")), BackendError);
  EXPECT_EQ(server.hits(), 2);
}

TEST(HttpBackend, ClientErrorsAreNotRetried) {
  FakeServer server(10, 400);
  Gateway g(http_config(server.url(), 2), std::make_shared<HttpBackend>());
  EXPECT_THROW(g.complete(text_request("ping")), BackendError);
  EXPECT_EQ(server.hits(), 1);
}

TEST(HttpBackend, SendsBearerKeyFromEnvironment) {
  FakeServer server(0, 200);
  ::setenv("EVIDOC_TEST_KEY", "sekret", 1);
  auto cfg = http_config(server.url(), 0);
  cfg.ordinary->api_key_env = "EVIDOC_TEST_KEY";
  Gateway g(cfg, std::make_shared<HttpBackend>());
  g.complete(text_request("ping"));
  EXPECT_EQ(server.last_auth(), "Bearer sekret");
  ::unsetenv("EVIDOC_TEST_KEY");
  EXPECT_THROW(g.complete(text_request("ping")), ConfigError);
}

TEST(Prompts, RenderSubstitutesOnlyIdentifiers) {
  EXPECT_EQ(render_template("Q: {question} {\"k\": 1} {page_num}",
                            {{"question", "why"}, {"page_num", "3"}}),
            "Q: why {\"k\": 1} 3");
  EXPECT_THROW(render_template("{missing}", {}), ContractViolation);
  EXPECT_EQ(template_placeholders("{a} {b} {a} { c }"), (std::vector<std::string>{"a", "b"}));
}

TEST(Prompts, BuiltinsValidate) {
  const auto t = PromptTemplates::builtin();
  EXPECT_NO_THROW(t.validate());
  EXPECT_NE(t.clue_discovery.find("You are a Detective"), std::string::npos);
  EXPECT_NE(t.page_screening.find("Has_Chart: [Yes/No]"), std::string::npos);
}

TEST(Prompts, LoadOverridesAndValidates) {
  evidoc::testing::TempDir dir;
  {
    std::ofstream out(dir / "page_screening.txt");
    out << "Screen page {page_number} for {question}.";
  }
  const auto t = PromptTemplates::load(dir.path());
  EXPECT_EQ(t.page_screening, "Screen page {page_number} for {question}.");
  EXPECT_EQ(t.clue_discovery, PromptTemplates::builtin().clue_discovery);
  {
    std::ofstream out(dir / "page_screening.txt");
    out << "Screen page {page_number}.";
  }
  EXPECT_THROW(PromptTemplates::load(dir.path()), ConfigError);
  {
    std::ofstream out(dir / "page_screening.txt");
    out << "{question} {page_number} {bogus}";
  }
  EXPECT_THROW(PromptTemplates::load(dir.path()), ConfigError);
}
