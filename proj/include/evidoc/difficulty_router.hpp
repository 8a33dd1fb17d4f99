// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidoc/context_builder.hpp"
#include "evidoc/model_gateway.hpp"
#include "evidoc/prompts.hpp"

namespace evidoc {

inline constexpr std::string_view kDefaultInstructions = "Answer directly from the evidence.";

struct DifficultyDecision {
  int level = 0;  // 0 = ordinary, 1 = reasoning
  std::string instructions;
  bool fallback = false;  // model output was unusable
  std::vector<std::string> warnings;
};

/// Strict reading of {"difficulty_level": 0|1, "instruction_set": "..."}.
/// Malformed output falls back to level 0 with the default instructions.
DifficultyDecision parse_difficulty_reply(std::string_view reply);

ChatRequest assessment_request(const std::string& question, const EvidenceContext& context,
                               const PromptTemplates& templates);

/// Exactly one model call. Gateway errors propagate.
DifficultyDecision assess(const std::string& question, const EvidenceContext& context,
                          Gateway& gateway, const PromptTemplates& templates);

ModelClass route(const DifficultyDecision& decision);

nlohmann::json to_json(const DifficultyDecision& d);

}  // namespace evidoc
