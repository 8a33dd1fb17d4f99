// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <gtest/gtest.h>

#include "evidoc/page_screening.hpp"
#include "test_support.hpp"

using namespace evidoc;
using nlohmann::json;
using evidoc::testing::MockRig;
using evidoc::testing::page_images;

namespace {

ScreeningVerdict verdict(int page, RelevanceLabel label) {
  ScreeningVerdict v;
  v.page = page;
  v.label = label;
  v.has_chart = label != RelevanceLabel::kNone;
  return v;
}

}  // namespace

TEST(ParseScreeningReply, Corpus) {
  const auto corpus = json::parse(
      evidoc::testing::read_file(evidoc::testing::fixture_dir() / "protocol/screening_corpus.json"));
  ASSERT_GE(corpus.size(), 15u);
  for (const auto& c : corpus) {
    SCOPED_TRACE(c["name"].get<std::string>());
    const auto v = parse_screening_reply(c["reply"].get<std::string>(), 6);
    const auto& want = c["expect"];
    EXPECT_EQ(v.page, 6);
    EXPECT_EQ(v.has_chart, want["has_chart"].get<bool>());
    EXPECT_EQ(to_string(v.label), want["label"].get<std::string>());
    EXPECT_EQ(v.fail_closed, want["fail_closed"].get<bool>());
    if (want.contains("rationale")) EXPECT_EQ(v.rationale, want["rationale"]);
    EXPECT_EQ(v.label == RelevanceLabel::kNone, !v.has_chart);
    if (v.fail_closed) EXPECT_FALSE(v.warnings.empty());
  }
}

TEST(ScreeningRequest, OnePageImage) {
  const auto req = screening_request({2, "p2.png"}, "Which year?", PromptTemplates::builtin());
  ASSERT_EQ(req.image_parts.size(), 1u);
  EXPECT_EQ(req.purpose, "page_screening");
  EXPECT_EQ(req.page, 2);
  EXPECT_NE(req.text_parts[0].find("Page Number: 2"), std::string::npos);
}

TEST(BuildRetainedSet, WorkedExample) {
  const std::vector<ScreeningVerdict> v = {
      verdict(1, RelevanceLabel::kCR), verdict(2, RelevanceLabel::kIR),
      verdict(3, RelevanceLabel::kR), verdict(4, RelevanceLabel::kNone),
      verdict(5, RelevanceLabel::kIR)};
  EXPECT_EQ(build_retained_set(v).pages, (std::vector<int>{1, 3}));
}

TEST(BuildRetainedSet, AllIrrelevantIsEmptyAllRelevantIsEverything) {
  std::vector<ScreeningVerdict> ir, cr;
  for (int p = 1; p <= 5; ++p) {
    ir.push_back(verdict(p, RelevanceLabel::kIR));
    cr.push_back(verdict(6 - p, RelevanceLabel::kCR));
  }
  EXPECT_TRUE(build_retained_set(ir).pages.empty());
  EXPECT_EQ(build_retained_set(cr).pages, (std::vector<int>{1, 2, 3, 4, 5}));
}

TEST(BuildRetainedSet, ContainsLookup) {
  const auto set = build_retained_set(std::vector<ScreeningVerdict>{
      verdict(9, RelevanceLabel::kR), verdict(2, RelevanceLabel::kCR)});
  EXPECT_TRUE(set.contains(2));
  EXPECT_TRUE(set.contains(9));
  EXPECT_FALSE(set.contains(3));
}

TEST(ScreenAll, BackendFailureFailsClosed) {
  MockRig rig(json{{"rules",
                    {{{"purpose", "page_screening"}, {"page", 1},
                      {"reply", "Has_Chart: Yes\nRelevance: Relevant\nReasoning: r"}}}}});
  const auto verdicts =
      screen_all(page_images({1, 2}), "q", rig.gateway, PromptTemplates::builtin());
  EXPECT_EQ(verdicts.at(1).label, RelevanceLabel::kR);
  EXPECT_EQ(verdicts.at(2).label, RelevanceLabel::kIR);
  EXPECT_TRUE(verdicts.at(2).fail_closed);
  EXPECT_EQ(build_retained_set(verdicts).pages, (std::vector<int>{1}));
}

TEST(ScreeningVerdict, JsonRoundTrip) {
  const auto v = parse_screening_reply("Has_Chart: Yes\nRelevance: Relevant\nReasoning: r", 3);
  EXPECT_EQ(verdict_from_json(to_json(v)), v);
}
