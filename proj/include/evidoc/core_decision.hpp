// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidoc/clue_discovery.hpp"
#include "evidoc/context_builder.hpp"
#include "evidoc/difficulty_router.hpp"
#include "evidoc/embedding_index.hpp"
#include "evidoc/model_gateway.hpp"
#include "evidoc/page_screening.hpp"
#include "evidoc/prompts.hpp"

namespace evidoc {

/// Exact answer emitted when no evidence supports an answer.
inline constexpr std::string_view kUnanswerable = "No answers found!";

inline constexpr std::string_view kSourceClueDiscovery = "clue_discovery";
inline constexpr std::string_view kSourceRetainedPage = "retained_page";

struct EvidenceReference {
  int page_index = 0;
  std::string evidence_content;
  std::string evidence_source;  // kSourceClueDiscovery or kSourceRetainedPage

  friend bool operator==(const EvidenceReference&, const EvidenceReference&) = default;
};

struct AnswerBundle {
  std::string answer;
  std::vector<EvidenceReference> references;
  ModelClass model_class_used = ModelClass::kOrdinary;
  PromptMode prompt_mode = PromptMode::kTextOnly;
  bool model_called = false;
};

/// Final prompt as it is (or would be) sent to the decision model.
struct DecisionPrompt {
  PromptMode mode = PromptMode::kTextOnly;
  std::string text;
  std::vector<ImageRef> images;  // nonempty exactly in with-visuals mode
};

DecisionPrompt render_decision_prompt(const EvidenceContext& context,
                                      const DifficultyDecision& decision,
                                      const PromptTemplates& templates);

/// Page numbers cited in free text ("Page 4", "pages 2 and 5", "p. 3", "pages 2-4").
std::vector<int> mentioned_pages(std::string_view text);

/// Rebuilds the reference table from the pages an answer cites. Pages outside
/// the candidate set are ignored.
std::vector<EvidenceReference> extract_references(std::string_view answer,
                                                  const EvidenceContext& context);

/// With no evidence the unanswerable sentinel is returned without a model call.
AnswerBundle decide(const EvidenceContext& context, const DifficultyDecision& decision,
                    Gateway& gateway, const PromptTemplates& templates);

using ImageResolver = std::function<ImageRef(int page)>;

/// Everything a single question produced, in pipeline order.
struct RunRecord {
  std::string doc_id;
  std::string question;
  QueryEmbedding query;
  std::size_t k = 5;
  std::vector<RelevanceScore> retrieval;
  std::map<int, PageClueReport> clues;
  std::map<int, ScreeningVerdict> verdicts;
  EvidenceContext context;
  DifficultyDecision difficulty;
  DecisionPrompt decision_prompt;
  AnswerBundle answer;
};

/// retrieve -> (clue discovery || screening) -> context -> assess -> decide.
/// Failures are rethrown as StageError naming the stage.
RunRecord run_pipeline(const MultiVectorIndex& index, const QueryEmbedding& query,
                       const std::string& question, std::size_t k, Gateway& gateway,
                       const PromptTemplates& templates, const ImageResolver& images);

nlohmann::json to_json(const AnswerBundle& bundle);

/// Writes query.json, retrieval.json, clues.jsonl, verdicts.jsonl, context.txt,
/// decision.json and answer.json. Output is a pure function of the record.
void write_run_directory(const RunRecord& run, const std::filesystem::path& dir);

}  // namespace evidoc
