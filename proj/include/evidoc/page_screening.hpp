// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidoc/model_gateway.hpp"
#include "evidoc/prompts.hpp"

namespace evidoc {

/// CR = completely relevant, R = relevant, IR = irrelevant,
/// None = the page carries no chart, table or figure.
enum class RelevanceLabel { kCR, kR, kIR, kNone };

std::string_view to_string(RelevanceLabel l);

struct ScreeningVerdict {
  int page = 0;
  bool has_chart = false;  // label == kNone exactly when has_chart is false
  RelevanceLabel label = RelevanceLabel::kIR;
  std::string rationale;
  bool fail_closed = false;  // reply was unusable and the page was forced to IR
  std::vector<std::string> warnings;

  friend bool operator==(const ScreeningVerdict&, const ScreeningVerdict&) = default;
};

/// Pages kept for the decision stage, ascending.
struct RetainedSet {
  std::vector<int> pages;

  bool contains(int page) const;
  friend bool operator==(const RetainedSet&, const RetainedSet&) = default;
};

/// Decodes the line protocol
///   Has_Chart: Yes|No
///   Relevance: Completely Relevant|Relevant|Irrelevant|none
///   Reasoning: ...
/// Keys are matched ignoring case, spacing, underscores and markdown emphasis.
/// Anything that cannot be read with confidence fails closed to IR.
ScreeningVerdict parse_screening_reply(std::string_view reply, int page_index);

ChatRequest screening_request(const ImageRef& page, const std::string& question,
                              const PromptTemplates& templates);

ScreeningVerdict screen(const ImageRef& page, const std::string& question, Gateway& gateway,
                        const PromptTemplates& templates);

/// Screens every page; a backend failure on one page fails that page closed.
std::map<int, ScreeningVerdict> screen_all(std::span<const ImageRef> pages,
                                           const std::string& question, Gateway& gateway,
                                           const PromptTemplates& templates);

/// Keeps exactly the CR and R pages.
RetainedSet build_retained_set(std::span<const ScreeningVerdict> verdicts);
RetainedSet build_retained_set(const std::map<int, ScreeningVerdict>& verdicts);

nlohmann::json to_json(const ScreeningVerdict& v);
ScreeningVerdict verdict_from_json(const nlohmann::json& j);

}  // namespace evidoc
