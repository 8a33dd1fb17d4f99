// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <gtest/gtest.h>

#include "evidoc/context_builder.hpp"
#include "evidoc/errors.hpp"
#include "test_support.hpp"

using namespace evidoc;

namespace {

EvidenceRecord record(int page, std::string content) {
  EvidenceRecord r;
  r.page = page;
  r.content = std::move(content);
  r.region = "region " + std::to_string(page);
  r.insight = "insight " + std::to_string(page);
  return r;
}

PageClueReport report(int page, std::vector<std::string> contents) {
  PageClueReport r;
  r.page = page;
  for (auto& c : contents) r.records.push_back(record(page, c));
  r.has_relevant_evidence = !r.records.empty();
  return r;
}

std::map<int, ImageRef> images_for(std::initializer_list<int> pages) {
  std::map<int, ImageRef> out;
  for (int p : pages) out[p] = {p, "p" + std::to_string(p) + ".png"};
  return out;
}

}  // namespace

TEST(BuildContext, OrdersEvidenceByPageThenDiscovery) {
  std::map<int, PageClueReport> reports = {
      {3, report(3, {"c1"})}, {1, report(1, {})}, {2, report(2, {"b1", "b2"})}};
  const auto ctx = build_context(reports, RetainedSet{{2}}, "q", images_for({1, 2, 3}));
  ASSERT_EQ(ctx.evidence.size(), 3u);
  EXPECT_EQ(ctx.evidence[0].content, "b1");
  EXPECT_EQ(ctx.evidence[1].content, "b2");
  EXPECT_EQ(ctx.evidence[2].content, "c1");
  EXPECT_EQ(ctx.source_pages, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(ctx.num_source_pages(), 3);
  ASSERT_EQ(ctx.retained_images.size(), 1u);
  EXPECT_EQ(ctx.retained_images[0].uri, "p2.png");
}

TEST(BuildContext, EvidenceFromUnretainedPagesIsKept) {
  std::map<int, PageClueReport> reports = {{1, report(1, {"a"})}, {2, report(2, {})}};
  const auto ctx = build_context(reports, RetainedSet{{2}}, "q", images_for({1, 2}));
  ASSERT_EQ(ctx.evidence.size(), 1u);
  EXPECT_EQ(ctx.evidence[0].page, 1);
}

TEST(BuildContext, EmptyIsLegal) {
  std::map<int, PageClueReport> reports = {{1, report(1, {})}};
  const auto ctx = build_context(reports, RetainedSet{}, "q", {});
  EXPECT_TRUE(ctx.evidence.empty());
  EXPECT_EQ(select_prompt_mode(ctx), PromptMode::kTextOnly);
}

TEST(BuildContext, RejectsRetainedPageOutsideCandidates) {
  std::map<int, PageClueReport> reports = {{1, report(1, {})}};
  EXPECT_THROW(build_context(reports, RetainedSet{{4}}, "q", images_for({1, 4})),
               ContractViolation);
  EXPECT_THROW(build_context(reports, RetainedSet{{1}}, "q", {}), ContractViolation);
}

TEST(SelectPromptMode, AllFourCombinations) {
  for (bool retained : {false, true}) {
    for (bool evidence : {false, true}) {
      std::map<int, PageClueReport> reports = {
          {1, report(1, evidence ? std::vector<std::string>{"x"} : std::vector<std::string>{})},
          {2, report(2, {})}};
      const auto ctx = build_context(reports, retained ? RetainedSet{{1, 2}} : RetainedSet{}, "q",
                                     images_for({1, 2}));
      EXPECT_EQ(select_prompt_mode(ctx), retained ? PromptMode::kWithVisuals : PromptMode::kTextOnly);
      EXPECT_EQ(ctx.retained_images.size(), retained ? 2u : 0u);
      EXPECT_EQ(ctx.evidence.size(), evidence ? 1u : 0u);
    }
  }
}

TEST(RenderEvidenceSummary, NumberedLabeledItems) {
  const std::vector<EvidenceRecord> e = {record(2, "Revenue: 100"), record(4, "Revenue: 120")};
  EXPECT_EQ(render_evidence_summary(e),
            "1. Page: 2\n"
            "   Location: region 2\n"
            "   Content: Revenue: 100\n"
            "   Insight: insight 2\n"
            "\n"
            "2. Page: 4\n"
            "   Location: region 4\n"
            "   Content: Revenue: 120\n"
            "   Insight: insight 4");
  EXPECT_EQ(render_evidence_summary({}), "(no evidence was found on the retrieved pages)");
}

TEST(RenderEvidenceSummary, RationaleIsNotShown) {
  auto r = record(1, "c");
  r.rationale = "SECRET-RATIONALE";
  EXPECT_EQ(render_evidence_summary({r}).find("SECRET-RATIONALE"), std::string::npos);
}

TEST(RenderVisualSection, ListsRetainedPages) {
  std::map<int, PageClueReport> reports = {{2, report(2, {})}, {4, report(4, {})}};
  const auto ctx = build_context(reports, RetainedSet{{2, 4}}, "q", images_for({2, 4}));
  EXPECT_EQ(render_visual_section(ctx), "VISUAL EVIDENCE: 2 page images attached (Page 2, Page 4).");
}
