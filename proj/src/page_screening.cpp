// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/page_screening.hpp"

#include <algorithm>
#include <optional>

#include <spdlog/spdlog.h>

#include "evidoc/errors.hpp"
#include "evidoc/fanout.hpp"
#include "text_util.hpp"

namespace evidoc {

namespace {

enum class Key { kHasChart, kRelevance, kReasoning };

constexpr std::string_view kDecoration = " \t\r*_[]\"'`";

std::string_view strip_decoration(std::string_view s) {
  const auto b = s.find_first_not_of(kDecoration);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kDecoration);
  return s.substr(b, e - b + 1);
}

std::optional<Key> classify_key(std::string_view raw) {
  std::string k;
  for (unsigned char c : raw) {
    if (std::isalnum(c)) k += static_cast<char>(std::tolower(c));
  }
  if (k.starts_with("haschart")) return Key::kHasChart;
  if (k.starts_with("relevance")) return Key::kRelevance;
  if (k.starts_with("reason")) return Key::kReasoning;
  return std::nullopt;
}

// Lowercased value without decoration or trailing sentence punctuation.
std::string clean_value(std::string_view v) {
  auto s = text::squash(strip_decoration(v));
  while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';')) s.pop_back();
  return std::string(strip_decoration(s));
}

bool starts_with_word(std::string_view s, std::string_view word) {
  return s.starts_with(word) &&
         (s.size() == word.size() || !std::isalpha(static_cast<unsigned char>(s[word.size()])));
}

std::optional<bool> parse_yes_no(std::string_view raw) {
  const auto v = clean_value(raw);
  if (starts_with_word(v, "yes") || starts_with_word(v, "true")) return true;
  if (starts_with_word(v, "no") || starts_with_word(v, "false")) return false;
  return std::nullopt;
}

std::optional<RelevanceLabel> parse_label(std::string_view raw) {
  const auto v = clean_value(raw);
  // "Completely Relevant/ Relevant/ Irrelevant" is the template echoed back.
  if (v.find('/') != std::string::npos || v.find('|') != std::string::npos) return std::nullopt;
  if (v == "cr") return RelevanceLabel::kCR;
  if (v == "r") return RelevanceLabel::kR;
  if (v == "ir") return RelevanceLabel::kIR;
  if (starts_with_word(v, "completely relevant")) return RelevanceLabel::kCR;
  if (starts_with_word(v, "irrelevant") || starts_with_word(v, "not relevant")) {
    return RelevanceLabel::kIR;
  }
  if (starts_with_word(v, "relevant")) return RelevanceLabel::kR;
  if (starts_with_word(v, "none")) return RelevanceLabel::kNone;
  return std::nullopt;
}

void warn(ScreeningVerdict& v, std::string msg) {
  spdlog::warn("page screening, page {}: {}", v.page, msg);
  v.warnings.push_back(std::move(msg));
}

void fail_closed(ScreeningVerdict& v, std::string why) {
  v.has_chart = true;
  v.label = RelevanceLabel::kIR;
  v.fail_closed = true;
  warn(v, "fail-closed to IR: " + why);
}

}  // namespace

std::string_view to_string(RelevanceLabel l) {
  switch (l) {
    case RelevanceLabel::kCR: return "CR";
    case RelevanceLabel::kR: return "R";
    case RelevanceLabel::kIR: return "IR";
    case RelevanceLabel::kNone: return "None";
  }
  return "IR";
}

bool RetainedSet::contains(int page) const {
  return std::binary_search(pages.begin(), pages.end(), page);
}

ScreeningVerdict parse_screening_reply(std::string_view reply, int page_index) {
  std::optional<std::string> has_chart_raw;
  std::optional<std::string> relevance_raw;
  std::optional<std::string> reasoning;
  bool in_reasoning = false;

  std::size_t pos = 0;
  while (pos <= reply.size()) {
    auto eol = reply.find('\n', pos);
    if (eol == std::string_view::npos) eol = reply.size();
    const auto line = reply.substr(pos, eol - pos);
    pos = eol + 1;

    auto body = text::trim(line);
    while (!body.empty() && (body.front() == '-' || body.front() == '*' || body.front() == '#' ||
                             body.front() == '>')) {
      body = text::trim(body.substr(1));
    }
    const auto colon = body.find(':');
    std::optional<Key> key;
    if (colon != std::string_view::npos) key = classify_key(body.substr(0, colon));
    if (!key) {
      if (in_reasoning && !body.empty()) *reasoning += " " + std::string(body);
      continue;
    }
    const auto value = body.substr(colon + 1);
    in_reasoning = false;
    switch (*key) {
      case Key::kHasChart:
        if (!has_chart_raw) has_chart_raw = std::string(value);
        break;
      case Key::kRelevance:
        if (!relevance_raw) relevance_raw = std::string(value);
        break;
      case Key::kReasoning:
        if (!reasoning) {
          reasoning = std::string(strip_decoration(text::trim(value)));
          in_reasoning = true;
        }
        break;
    }
  }

  ScreeningVerdict v;
  v.page = page_index;
  v.rationale = reasoning ? std::string(text::trim(*reasoning)) : std::string();

  if (!has_chart_raw) {
    fail_closed(v, "missing Has_Chart line");
    return v;
  }
  const auto has_chart = parse_yes_no(*has_chart_raw);
  if (!has_chart) {
    fail_closed(v, "unreadable Has_Chart value '" + std::string(text::trim(*has_chart_raw)) + "'");
    return v;
  }
  const auto label = relevance_raw ? parse_label(*relevance_raw) : std::nullopt;

  if (!*has_chart) {
    v.has_chart = false;
    v.label = RelevanceLabel::kNone;
    if (label && *label != RelevanceLabel::kNone) {
      warn(v, "relevance '" + std::string(text::trim(*relevance_raw)) +
                  "' ignored for a page without charts");
    }
    return v;
  }
  if (!relevance_raw) {
    fail_closed(v, "missing Relevance line");
  } else if (!label) {
    fail_closed(v, "unreadable Relevance value '" + std::string(text::trim(*relevance_raw)) + "'");
  } else if (*label == RelevanceLabel::kNone) {
    fail_closed(v, "Has_Chart is Yes but Relevance is none");
  } else {
    v.has_chart = true;
    v.label = *label;
  }
  return v;
}

ChatRequest screening_request(const ImageRef& page, const std::string& question,
                              const PromptTemplates& templates) {
  ChatRequest req;
  req.model_class = ModelClass::kOrdinary;
  req.text_parts.push_back(render_template(
      templates.page_screening,
      {{"question", question}, {"page_number", std::to_string(page.page)}}));
  req.image_parts.push_back(page);
  req.purpose = "page_screening";
  req.page = page.page;
  return req;
}

ScreeningVerdict screen(const ImageRef& page, const std::string& question, Gateway& gateway,
                        const PromptTemplates& templates) {
  const auto resp = gateway.complete(screening_request(page, question, templates));
  return parse_screening_reply(resp.text, page.page);
}

std::map<int, ScreeningVerdict> screen_all(std::span<const ImageRef> pages,
                                           const std::string& question, Gateway& gateway,
                                           const PromptTemplates& templates) {
  std::vector<ScreeningVerdict> verdicts(pages.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    tasks.emplace_back([&, i] {
      try {
        verdicts[i] = screen(pages[i], question, gateway, templates);
      } catch (const Error& e) {
        verdicts[i] = {};
        verdicts[i].page = pages[i].page;
        fail_closed(verdicts[i], std::string("backend failure: ") + e.what());
      }
    });
  }
  run_tasks(tasks, gateway.config().concurrency);

  std::map<int, ScreeningVerdict> out;
  for (auto& v : verdicts) out.emplace(v.page, std::move(v));
  return out;
}

RetainedSet build_retained_set(std::span<const ScreeningVerdict> verdicts) {
  RetainedSet out;
  for (const auto& v : verdicts) {
    if (v.label == RelevanceLabel::kCR || v.label == RelevanceLabel::kR) out.pages.push_back(v.page);
  }
  std::sort(out.pages.begin(), out.pages.end());
  out.pages.erase(std::unique(out.pages.begin(), out.pages.end()), out.pages.end());
  return out;
}

RetainedSet build_retained_set(const std::map<int, ScreeningVerdict>& verdicts) {
  std::vector<ScreeningVerdict> flat;
  for (const auto& [_, v] : verdicts) flat.push_back(v);
  return build_retained_set(flat);
}

nlohmann::json to_json(const ScreeningVerdict& v) {
  return {{"page", v.page},
          {"has_chart", v.has_chart},
          {"label", to_string(v.label)},
          {"rationale", v.rationale},
          {"fail_closed", v.fail_closed},
          {"warnings", v.warnings}};
}

ScreeningVerdict verdict_from_json(const nlohmann::json& j) {
  ScreeningVerdict v;
  v.page = j.at("page").get<int>();
  v.has_chart = j.at("has_chart").get<bool>();
  const auto label = j.at("label").get<std::string>();
  if (label == "CR") {
    v.label = RelevanceLabel::kCR;
  } else if (label == "R") {
    v.label = RelevanceLabel::kR;
  } else if (label == "None") {
    v.label = RelevanceLabel::kNone;
  } else {
    v.label = RelevanceLabel::kIR;
  }
  v.rationale = j.value("rationale", "");
  v.fail_closed = j.value("fail_closed", false);
  v.warnings = j.value("warnings", std::vector<std::string>{});
  return v;
}

}  // namespace evidoc
