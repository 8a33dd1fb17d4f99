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

enum class EvidenceType { kText, kChart, kTable, kFigure };
enum class Confidence { kHigh, kMedium, kLow };

std::string_view to_string(EvidenceType t);
std::string_view to_string(Confidence c);

/// One traceable clue pulled from a single page.
struct EvidenceRecord {
  int page = 0;            // 1-based, always the page that was shown to the model
  std::string region;      // free-text location on the page
  std::string content;     // quote, value or description; never empty
  std::string insight;
  std::string rationale;   // why the model judged it relevant
  EvidenceType evidence_type = EvidenceType::kText;
  Confidence confidence = Confidence::kMedium;  // informational only

  friend bool operator==(const EvidenceRecord&, const EvidenceRecord&) = default;
};

struct PageClueReport {
  int page = 0;
  bool has_relevant_evidence = false;  // always == !records.empty()
  std::vector<EvidenceRecord> records;
  std::string page_summary;
  std::string key_insights;
  bool degraded = false;               // reply could not be used
  std::vector<std::string> warnings;

  friend bool operator==(const PageClueReport&, const PageClueReport&) = default;
};

/// Decodes a clue-discovery reply. Never throws on bad model output: an
/// unusable reply yields a degraded, evidence-free report with a warning.
PageClueReport parse_clue_reply(std::string_view reply, int page_index);

ChatRequest clue_request(const ImageRef& page, const std::string& question,
                         const PromptTemplates& templates);

/// One model call over exactly one page image. Gateway errors propagate.
PageClueReport discover(const ImageRef& page, const std::string& question, Gateway& gateway,
                        const PromptTemplates& templates);

/// Scans every page; a failing page degrades instead of aborting the batch.
std::map<int, PageClueReport> discover_all(std::span<const ImageRef> pages,
                                           const std::string& question, Gateway& gateway,
                                           const PromptTemplates& templates);

/// Union of all records, ascending by page then discovery order.
std::vector<EvidenceRecord> collect_evidence(const std::map<int, PageClueReport>& reports);

nlohmann::json to_json(const EvidenceRecord& r);
nlohmann::json to_json(const PageClueReport& r);
PageClueReport clue_report_from_json(const nlohmann::json& j);

}  // namespace evidoc
