// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/difficulty_router.hpp"

#include <spdlog/spdlog.h>

#include "evidoc/errors.hpp"
#include "text_util.hpp"

namespace evidoc {

namespace {

DifficultyDecision fallback(std::string why) {
  spdlog::warn("difficulty assessment: {}; falling back to ordinary mode", why);
  DifficultyDecision d;
  d.level = 0;
  d.instructions = std::string(kDefaultInstructions);
  d.fallback = true;
  d.warnings.push_back(std::move(why));
  return d;
}

}  // namespace

DifficultyDecision parse_difficulty_reply(std::string_view reply) {
  nlohmann::json obj;
  try {
    obj = extract_json_object(reply);
  } catch (const ProtocolError& e) {
    return fallback(std::string("protocol error: ") + e.what());
  }
  if (!obj.contains("difficulty_level")) return fallback("missing difficulty_level");

  const auto& raw = obj["difficulty_level"];
  long long level = -1;
  if (raw.is_number_integer()) {
    level = raw.get<long long>();
  } else if (raw.is_string()) {
    const auto s = text::trim(raw.get<std::string>());
    if (s == "0") level = 0;
    if (s == "1") level = 1;
  }
  if (level != 0 && level != 1) return fallback("invalid difficulty_level " + raw.dump());

  DifficultyDecision d;
  d.level = static_cast<int>(level);
  if (obj.contains("instruction_set") && obj["instruction_set"].is_string() &&
      !text::trim(obj["instruction_set"].get<std::string>()).empty()) {
    d.instructions = obj["instruction_set"].get<std::string>();
  } else {
    d.instructions = std::string(kDefaultInstructions);
    d.warnings.push_back("missing or empty instruction_set; using default instructions");
    spdlog::warn("difficulty assessment: {}", d.warnings.back());
  }
  return d;
}

ChatRequest assessment_request(const std::string& question, const EvidenceContext& context,
                               const PromptTemplates& templates) {
  ChatRequest req;
  req.model_class = ModelClass::kOrdinary;
  req.text_parts.push_back(render_template(
      templates.difficulty_assessment,
      {{"question", question}, {"structured_context", render_structured_context(context)}}));
  req.image_parts = context.retained_images;
  req.purpose = "difficulty_assessment";
  return req;
}

DifficultyDecision assess(const std::string& question, const EvidenceContext& context,
                          Gateway& gateway, const PromptTemplates& templates) {
  const auto resp = gateway.complete(assessment_request(question, context, templates));
  return parse_difficulty_reply(resp.text);
}

ModelClass route(const DifficultyDecision& decision) {
  return decision.level == 1 ? ModelClass::kReasoning : ModelClass::kOrdinary;
}

nlohmann::json to_json(const DifficultyDecision& d) {
  return {{"difficulty_level", d.level},
          {"instruction_set", d.instructions},
          {"model_class", to_string(route(d))},
          {"fallback", d.fallback},
          {"warnings", d.warnings}};
}

}  // namespace evidoc
