// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/core_decision.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "evidoc/errors.hpp"
#include "text_util.hpp"

namespace evidoc {

namespace {

constexpr int kMaxRangeSpan = 200;

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Cursor {
 public:
  explicit Cursor(std::string_view s, std::size_t pos) : s_(s), pos_(pos) {}

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool eat(std::string_view token, bool word = false) {
    if (s_.substr(pos_, token.size()) != token) return false;
    const auto end = pos_ + token.size();
    if (word && end < s_.size() && is_alpha(s_[end])) return false;
    pos_ = end;
    return true;
  }

  std::optional<int> number() {
    std::size_t end = pos_;
    while (end < s_.size() && is_digit(s_[end]) && end - pos_ < 6) ++end;
    if (end == pos_ || (end < s_.size() && is_digit(s_[end]))) return std::nullopt;
    const int n = std::stoi(std::string(s_.substr(pos_, end - pos_)));
    pos_ = end;
    return n;
  }

  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }

 private:
  std::string_view s_;
  std::size_t pos_;
};

// Parses "4", "2, 5 and 7", "2-4" after a page keyword.
void read_page_list(Cursor& c, std::set<int>& out) {
  c.skip_space();
  c.eat("#");
  c.eat("no.");
  c.skip_space();
  auto first = c.number();
  if (!first) return;
  out.insert(*first);
  int last = *first;
  while (true) {
    const auto save = c.pos();
    c.skip_space();
    bool range = false;
    if (c.eat("-") || c.eat("\xE2\x80\x93") || c.eat("to", true)) {
      range = true;
    } else if (!(c.eat(",") || c.eat("&") || c.eat("and", true))) {
      c.reset(save);
      return;
    }
    c.skip_space();
    c.eat("and", true);
    c.skip_space();
    c.eat("page", true) || c.eat("p.");
    c.skip_space();
    auto next = c.number();
    if (!next) {
      c.reset(save);
      return;
    }
    if (range && *next > last && *next - last <= kMaxRangeSpan) {
      for (int p = last + 1; p <= *next; ++p) out.insert(p);
    } else {
      out.insert(*next);
    }
    last = *next;
  }
}

}  // namespace

std::vector<int> mentioned_pages(std::string_view text) {
  const auto lowered = text::lower(text);
  const std::string_view s = lowered;
  std::set<int> pages;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && is_alpha(s[i - 1])) continue;
    Cursor c(s, i);
    const bool keyword = c.eat("pages", true) || c.eat("page", true) || c.eat("pgs.") ||
                         c.eat("pgs", true) || c.eat("pg.") || c.eat("pg", true) ||
                         c.eat("pp.") || c.eat("p.");
    if (!keyword) continue;
    read_page_list(c, pages);
  }
  return {pages.begin(), pages.end()};
}

std::vector<EvidenceReference> extract_references(std::string_view answer,
                                                  const EvidenceContext& context) {
  std::vector<EvidenceReference> refs;
  for (int page : mentioned_pages(answer)) {
    if (!std::binary_search(context.source_pages.begin(), context.source_pages.end(), page)) {
      continue;
    }
    for (const auto& rec : context.evidence) {
      if (rec.page == page) {
        refs.push_back({page, rec.content, std::string(kSourceClueDiscovery)});
      }
    }
    for (const auto& img : context.retained_images) {
      if (img.page == page) refs.push_back({page, img.uri, std::string(kSourceRetainedPage)});
    }
  }
  return refs;
}

DecisionPrompt render_decision_prompt(const EvidenceContext& context,
                                      const DifficultyDecision& decision,
                                      const PromptTemplates& templates) {
  DecisionPrompt p;
  p.mode = select_prompt_mode(context);
  PromptVars vars{{"question", context.question},
                  {"instruction_set", decision.instructions},
                  {"num_pages", std::to_string(context.num_source_pages())},
                  {"evidence_summary", render_evidence_summary(context.evidence)}};
  if (p.mode == PromptMode::kWithVisuals) {
    vars.emplace("visual_evidence_section", render_visual_section(context));
    p.text = render_template(templates.decision_with_visuals, vars);
    p.images = context.retained_images;
  } else {
    p.text = render_template(templates.decision_text_only, vars);
  }
  return p;
}

AnswerBundle decide(const EvidenceContext& context, const DifficultyDecision& decision,
                    Gateway& gateway, const PromptTemplates& templates) {
  const auto prompt = render_decision_prompt(context, decision, templates);
  AnswerBundle bundle;
  bundle.prompt_mode = prompt.mode;
  bundle.model_class_used = route(decision);
  if (context.evidence.empty()) {
    bundle.answer = std::string(kUnanswerable);
    return bundle;
  }

  ChatRequest req;
  req.model_class = bundle.model_class_used;
  req.text_parts.push_back(prompt.text);
  req.image_parts = prompt.images;
  req.purpose = "core_decision";
  const auto resp = gateway.complete(std::move(req));
  if (text::trim(resp.text).empty()) throw Error("empty decision output");

  bundle.model_called = true;
  bundle.answer = resp.text;
  bundle.references = extract_references(bundle.answer, context);
  return bundle;
}

nlohmann::json to_json(const AnswerBundle& bundle) {
  nlohmann::json refs = nlohmann::json::array();
  for (const auto& r : bundle.references) {
    refs.push_back({{"page_index", r.page_index},
                    {"evidence_content", r.evidence_content},
                    {"evidence_source", r.evidence_source}});
  }
  return {{"answer", bundle.answer},
          {"references", std::move(refs)},
          {"model_class_used", to_string(bundle.model_class_used)},
          {"prompt_mode", to_string(bundle.prompt_mode)},
          {"model_called", bundle.model_called}};
}

}  // namespace evidoc
