// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace evidoc {

/// The five agent prompts. Built-in copies are compiled from prompts/*.txt;
/// a template directory may override any of them file by file.
struct PromptTemplates {
  std::string clue_discovery;
  std::string page_screening;
  std::string difficulty_assessment;
  std::string decision_text_only;
  std::string decision_with_visuals;

  static PromptTemplates builtin();

  /// Reads `<dir>/<name>.txt` for each template, keeping the built-in text for
  /// files that are absent. Validates placeholders; throws ConfigError.
  static PromptTemplates load(const std::filesystem::path& dir);

  /// Throws ConfigError if a template lacks a required placeholder or uses an
  /// unknown one.
  void validate() const;
};

using PromptVars = std::map<std::string, std::string, std::less<>>;

/// Substitutes `{name}` placeholders (name = [A-Za-z_][A-Za-z0-9_]*). Other
/// braces, such as JSON examples in the template, pass through untouched.
/// Throws ContractViolation for a placeholder with no binding.
std::string render_template(std::string_view tmpl, const PromptVars& vars);

/// Placeholder names appearing in a template, in first-seen order.
std::vector<std::string> template_placeholders(std::string_view tmpl);

}  // namespace evidoc
