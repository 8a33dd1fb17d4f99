// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "evidoc/cli_app.hpp"
#include "evidoc/config.hpp"
#include "evidoc/errors.hpp"
#include "test_support.hpp"

using namespace evidoc;
using namespace evidoc::testing;
using nlohmann::json;

namespace {

json minimal_config() {
  return {{"retriever", {{"index_path", "idx/{doc_id}.mvi"}}},
          {"backends",
           {{"ordinary", {{"endpoint", "http://h/v1/chat/completions"}, {"model", "m"}}},
            {"reasoning", "ordinary"}}},
          {"pages", {{"image_path", "pages/{doc_id}/{page}.png"}}}};
}

void write_json(const std::filesystem::path& p, const json& j) {
  std::ofstream(p) << j.dump(2);
}

}  // namespace

TEST(Config, DefaultsAndAlias) {
  const auto c = parse_config(minimal_config(), "/base");
  EXPECT_EQ(c.retriever.k, 5u);
  EXPECT_DOUBLE_EQ(c.gateway.temperature, 0.1);
  EXPECT_EQ(c.gateway.retries, 2);
  ASSERT_TRUE(c.gateway.reasoning);
  EXPECT_EQ(c.gateway.reasoning->model, "m");
  EXPECT_EQ(c.index_path_for("rep").string(), "/base/idx/rep.mvi");
  EXPECT_EQ(c.image_path_for("rep", 3), "/base/pages/rep/3.png");
  EXPECT_DOUBLE_EQ(c.scoring.float_tolerance, 0.01);
}

TEST(Config, RejectsUnknownKeysAtEveryLevel) {
  auto top = minimal_config();
  top["temprature"] = 0.2;
  EXPECT_THROW(parse_config(top, "."), ConfigError);
  auto nested = minimal_config();
  nested["retriever"]["topk"] = 3;
  EXPECT_THROW(parse_config(nested, "."), ConfigError);
  auto endpoint = minimal_config();
  endpoint["backends"]["ordinary"]["key"] = "x";
  EXPECT_THROW(parse_config(endpoint, "."), ConfigError);
}

TEST(Config, Validation) {
  auto no_reasoning = minimal_config();
  no_reasoning["backends"].erase("reasoning");
  EXPECT_THROW(parse_config(no_reasoning, "."), ConfigError);
  auto bad_k = minimal_config();
  bad_k["retriever"]["k"] = 0;
  EXPECT_THROW(parse_config(bad_k, "."), ConfigError);
  auto bad_temp = minimal_config();
  bad_temp["temperature"] = 3.0;
  EXPECT_THROW(parse_config(bad_temp, "."), ConfigError);
  auto wrong_type = minimal_config();
  wrong_type["concurrency"] = "four";
  EXPECT_THROW(parse_config(wrong_type, "."), ConfigError);
}

TEST(Config, EnvironmentInterpolation) {
  ::setenv("EVIDOC_TEST_MODEL", "big-model", 1);
  auto j = minimal_config();
  j["backends"]["ordinary"]["model"] = "${EVIDOC_TEST_MODEL}-v2";
  const auto c = parse_config(j, ".");
  EXPECT_EQ(c.gateway.ordinary->model, "big-model-v2");
  EXPECT_EQ(c.source["backends"]["ordinary"]["model"], "${EVIDOC_TEST_MODEL}-v2");
  ::unsetenv("EVIDOC_TEST_MODEL");
  EXPECT_THROW(parse_config(j, "."), ConfigError);
  EXPECT_EQ(interpolate_env("plain"), "plain");
  EXPECT_THROW(interpolate_env("${UNTERMINATED"), ConfigError);
}

TEST(CliIndex, ImportSummaryAndExportRoundTrip) {
  TempDir dir;
  std::ofstream(dir / "in.jsonl") << "{\"page_index\": 1, \"vectors\": [[1, 0]]}\n"
                                     "{\"page_index\": 2, \"vectors\": [[0, 1], [1, 1]]}\n"
                                     "{\"page_index\": 3, \"vectors\": [[0.5, 0.5]]}\n";
  std::ostringstream out, err;
  ASSERT_EQ(app::run_index({dir / "in.jsonl", dir / "d.mvi", "d"}, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("3 pages, dim 2, 4 vectors"), std::string::npos) << out.str();

  std::ostringstream exported;
  ASSERT_EQ(app::run_export({dir / "d.mvi", "-"}, exported, err), 0);
  std::ofstream(dir / "again.jsonl") << exported.str();
  ASSERT_EQ(app::run_index({dir / "again.jsonl", dir / "d2.mvi", ""}, out, err), 0);
  EXPECT_EQ(read_file(dir / "d.mvi"), read_file(dir / "d2.mvi"));
}

TEST(CliIndex, SchemaErrorNamesLine) {
  TempDir dir;
  std::ofstream(dir / "in.jsonl") << "{\"page_index\": 1, \"vectors\": [[1, 0]]}\n"
                                     "{\"page_index\": 2, \"vectors\": [[1, 0, 0]]}\n";
  std::ostringstream out, err;
  EXPECT_NE(app::run_index({dir / "in.jsonl", dir / "d.mvi", "d"}, out, err), 0);
  EXPECT_NE(err.str().find("line 2"), std::string::npos) << err.str();
  EXPECT_FALSE(std::filesystem::exists(dir / "d.mvi"));
}

TEST(CliAsk, MissingIndexReportsPath) {
  TempDir dir;
  write_json(dir / "config.json", minimal_config());
  app::AskOptions o;
  o.config = dir / "config.json";
  o.doc_id = "nope";
  o.question = "q";
  std::ostringstream out, err;
  EXPECT_EQ(app::run_ask(o, out, err), app::kExitFailure);
  EXPECT_NE(err.str().find("index not found"), std::string::npos) << err.str();
  EXPECT_NE(err.str().find((dir / "idx" / "nope.mvi").string()), std::string::npos) << err.str();
}

TEST(CliAsk, MissingConfigIsUsageError) {
  app::AskOptions o;
  o.config = "/nonexistent/config.json";
  o.doc_id = "d";
  o.question = "q";
  std::ostringstream out, err;
  EXPECT_EQ(app::run_ask(o, out, err), app::kExitUsage);
}

TEST(CliEval, EmptyItemsFile) {
  TempDir dir;
  write_json(dir / "config.json", minimal_config());
  std::ofstream(dir / "items.jsonl") << "\n";
  app::EvalCommandOptions o;
  o.config = dir / "config.json";
  o.items = dir / "items.jsonl";
  std::ostringstream out, err;
  EXPECT_NE(app::run_eval(o, out, err), 0);
  EXPECT_NE(err.str().find("no items"), std::string::npos) << err.str();
}

TEST(CliEval, PredictionsOnlyNeedsNoConfig) {
  TempDir dir;
  std::ofstream(dir / "items.jsonl")
      << R"({"question_id":"a","doc_id":"d","question":"?","gold_answer":"7","answer_type":"Int","category":"X"})"
      << "\n"
      << R"({"question_id":"b","doc_id":"d","question":"?","gold_answer":"8","answer_type":"Int","category":"X"})"
      << "\n";
  std::ofstream(dir / "pred.jsonl") << R"({"question_id":"a","predicted":"7"})" << "\n"
                                    << R"({"question_id":"b","predicted":"9"})" << "\n";
  app::EvalCommandOptions o;
  o.items = dir / "items.jsonl";
  o.predictions = dir / "pred.jsonl";
  o.report_dir = dir / "report";
  std::ostringstream out, err;
  ASSERT_EQ(app::run_eval(o, out, err), 0) << err.str();
  const auto report = json::parse(read_file(dir / "report" / "report.json"));
  EXPECT_DOUBLE_EQ(report["overall"].get<double>(), 50.0);
}

TEST(CliEval, MissingPredictionIsAnErroredItemAndNonzeroExit) {
  TempDir dir;
  std::ofstream(dir / "items.jsonl")
      << R"({"question_id":"a","doc_id":"d","question":"?","gold_answer":"7","answer_type":"Int","category":"X"})"
      << "\n";
  std::ofstream(dir / "pred.jsonl") << "\n";
  app::EvalCommandOptions o;
  o.items = dir / "items.jsonl";
  o.predictions = dir / "pred.jsonl";
  o.report_dir = dir / "report";
  std::ostringstream out, err;
  EXPECT_EQ(app::run_eval(o, out, err), app::kExitFailure);
}

TEST(RunDirectoryName, Deterministic) {
  EXPECT_EQ(app::run_directory_name("doc", "q"), app::run_directory_name("doc", "q"));
  EXPECT_NE(app::run_directory_name("doc", "q"), app::run_directory_name("doc", "q2"));
  EXPECT_EQ(app::run_directory_name("doc", "q").rfind("doc-", 0), 0u);
}
