// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "evidoc/errors.hpp"

namespace evidoc {

namespace detail {
// Generated from prompts/*.txt at configure time.
extern const char* const kBuiltinClueDiscovery;
extern const char* const kBuiltinPageScreening;
extern const char* const kBuiltinDifficultyAssessment;
extern const char* const kBuiltinDecisionTextOnly;
extern const char* const kBuiltinDecisionWithVisuals;
}  // namespace detail

namespace {

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

// Visits literal text and placeholder names in order.
template <typename OnText, typename OnVar>
void scan(std::string_view tmpl, OnText on_text, OnVar on_var) {
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) break;
    std::size_t i = open + 1;
    if (i < tmpl.size() && ident_start(tmpl[i])) {
      while (i < tmpl.size() && ident_char(tmpl[i])) ++i;
      if (i < tmpl.size() && tmpl[i] == '}') {
        on_text(tmpl.substr(pos, open - pos));
        on_var(tmpl.substr(open + 1, i - open - 1));
        pos = i + 1;
        continue;
      }
    }
    on_text(tmpl.substr(pos, open + 1 - pos));
    pos = open + 1;
  }
  on_text(tmpl.substr(pos));
}

struct Slot {
  const char* file;
  std::string PromptTemplates::*field;
  std::vector<std::string> required;
};

const std::vector<Slot>& slots() {
  static const std::vector<Slot> s = {
      {"clue_discovery", &PromptTemplates::clue_discovery, {"question", "page_num"}},
      {"page_screening", &PromptTemplates::page_screening, {"question", "page_number"}},
      {"difficulty_assessment", &PromptTemplates::difficulty_assessment,
       {"question", "structured_context"}},
      {"decision_text_only", &PromptTemplates::decision_text_only,
       {"question", "instruction_set", "num_pages", "evidence_summary"}},
      {"decision_with_visuals", &PromptTemplates::decision_with_visuals,
       {"question", "instruction_set", "num_pages", "evidence_summary",
        "visual_evidence_section"}},
  };
  return s;
}

}  // namespace

std::string render_template(std::string_view tmpl, const PromptVars& vars) {
  std::string out;
  out.reserve(tmpl.size());
  scan(
      tmpl, [&](std::string_view text) { out += text; },
      [&](std::string_view name) {
        auto it = vars.find(name);
        if (it == vars.end()) {
          throw ContractViolation("template placeholder {" + std::string(name) + "} is unbound");
        }
        out += it->second;
      });
  return out;
}

std::vector<std::string> template_placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  scan(
      tmpl, [](std::string_view) {},
      [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
      });
  return names;
}

PromptTemplates PromptTemplates::builtin() {
  return {detail::kBuiltinClueDiscovery, detail::kBuiltinPageScreening,
          detail::kBuiltinDifficultyAssessment, detail::kBuiltinDecisionTextOnly,
          detail::kBuiltinDecisionWithVisuals};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("prompt directory not found: " + dir.string());
  }
  auto t = builtin();
  for (const auto& slot : slots()) {
    const auto path = dir / (std::string(slot.file) + ".txt");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    t.*slot.field = ss.str();
  }
  t.validate();
  return t;
}

void PromptTemplates::validate() const {
  for (const auto& slot : slots()) {
    const auto names = template_placeholders(this->*slot.field);
    for (const auto& req : slot.required) {
      if (std::find(names.begin(), names.end(), req) == names.end()) {
        throw ConfigError(std::string("prompt '") + slot.file + "' lacks placeholder {" + req + "}");
      }
    }
    for (const auto& n : names) {
      if (std::find(slot.required.begin(), slot.required.end(), n) == slot.required.end()) {
        throw ConfigError(std::string("prompt '") + slot.file + "' uses unknown placeholder {" +
                          n + "}");
      }
    }
  }
}

}  // namespace evidoc
