// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <gtest/gtest.h>

#include "evidoc/difficulty_router.hpp"
#include "evidoc/errors.hpp"
#include "test_support.hpp"

using namespace evidoc;
using nlohmann::json;

TEST(ParseDifficulty, LevelOneRoutesToReasoning) {
  const auto d = parse_difficulty_reply(
      R"({"difficulty_level":1,"instruction_set":"Requires summing values from Page 2 (Table 1) and Page 5 (Text). Calculate the percentage growth."})");
  EXPECT_EQ(d.level, 1);
  EXPECT_FALSE(d.fallback);
  EXPECT_EQ(route(d), ModelClass::kReasoning);
  EXPECT_EQ(d.instructions,
            "Requires summing values from Page 2 (Table 1) and Page 5 (Text). Calculate the "
            "percentage growth.");
}

TEST(ParseDifficulty, LevelZeroRoutesToOrdinary) {
  const auto d = parse_difficulty_reply(R"({"difficulty_level":0,"instruction_set":"Read it."})");
  EXPECT_EQ(route(d), ModelClass::kOrdinary);
  EXPECT_EQ(d.instructions, "Read it.");
}

TEST(ParseDifficulty, StringLevelsAccepted) {
  EXPECT_EQ(parse_difficulty_reply(R"({"difficulty_level":"1","instruction_set":"x"})").level, 1);
  EXPECT_EQ(parse_difficulty_reply("```json\n{\"difficulty_level\": 0, \"instruction_set\": \"x\"}\n```")
                .level,
            0);
}

TEST(ParseDifficulty, MalformedFallsBack) {
  const std::vector<std::string> bad = {
      R"({"difficulty_level":2,"instruction_set":"x"})",
      R"({"difficulty_level":-1,"instruction_set":"x"})",
      R"({"difficulty_level":1.5,"instruction_set":"x"})",
      R"({"difficulty_level":"hard","instruction_set":"x"})",
      R"({"difficulty_level":true,"instruction_set":"x"})",
      R"({"difficulty_level":null})",
      R"({"instruction_set":"x"})",
      "difficulty 1",
      "",
      R"({"difficulty_level":1,)",
  };
  for (const auto& reply : bad) {
    SCOPED_TRACE(reply);
    const auto d = parse_difficulty_reply(reply);
    EXPECT_TRUE(d.fallback);
    EXPECT_EQ(d.level, 0);
    EXPECT_EQ(d.instructions, kDefaultInstructions);
    EXPECT_EQ(route(d), ModelClass::kOrdinary);
    EXPECT_FALSE(d.warnings.empty());
  }
}

TEST(ParseDifficulty, EmptyInstructionsKeepLevel) {
  const auto d = parse_difficulty_reply(R"({"difficulty_level":1,"instruction_set":"  "})");
  EXPECT_EQ(d.level, 1);
  EXPECT_FALSE(d.fallback);
  EXPECT_EQ(d.instructions, kDefaultInstructions);
  EXPECT_EQ(d.warnings.size(), 1u);
}

TEST(Assess, ExactlyOneCallWithContextAndImages) {
  evidoc::testing::MockRig rig(
      json{{"rules",
            {{{"purpose", "difficulty_assessment"},
              {"reply", R"({"difficulty_level":1,"instruction_set":"go"})"}}}}});
  EvidenceContext ctx;
  ctx.question = "q";
  ctx.source_pages = {1, 2};
  ctx.retained_pages = RetainedSet{{2}};
  ctx.retained_images = {{2, "p2.png"}};
  EvidenceRecord r;
  r.page = 1;
  r.content = "Revenue: 120";
  ctx.evidence = {r};

  const auto d = assess("What is revenue?", ctx, rig.gateway, PromptTemplates::builtin());
  EXPECT_EQ(d.level, 1);
  const auto calls = rig.backend->captured();
  ASSERT_EQ(calls.size(), 1u);
  EXPECT_EQ(calls[0].model_class, ModelClass::kOrdinary);
  ASSERT_EQ(calls[0].image_parts.size(), 1u);
  EXPECT_EQ(calls[0].image_parts[0].page, 2);
  EXPECT_NE(calls[0].text_parts[0].find("What is revenue?"), std::string::npos);
  EXPECT_NE(calls[0].text_parts[0].find("Revenue: 120"), std::string::npos);
}

TEST(Assess, BackendFailurePropagates) {
  evidoc::testing::MockRig rig(json::object());
  EvidenceContext ctx;
  EXPECT_THROW(assess("q", ctx, rig.gateway, PromptTemplates::builtin()), BackendError);
}
