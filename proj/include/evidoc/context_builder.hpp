// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <map>
#include <string>
#include <vector>

#include "evidoc/clue_discovery.hpp"
#include "evidoc/model_gateway.hpp"
#include "evidoc/page_screening.hpp"

namespace evidoc {

enum class PromptMode { kWithVisuals, kTextOnly };

std::string_view to_string(PromptMode m);

/// Retained page images plus all evidence mined from every candidate page.
struct EvidenceContext {
  std::string question;
  std::vector<int> source_pages;          // the candidate set, ascending
  RetainedSet retained_pages;             // subset of source_pages
  std::vector<ImageRef> retained_images;  // one per retained page, same order
  std::vector<EvidenceRecord> evidence;   // ascending by page, then discovery order

  int num_source_pages() const noexcept { return static_cast<int>(source_pages.size()); }
};

/// `reports` must cover every candidate page; `images` must hold an image for
/// every retained page. Throws ContractViolation otherwise.
EvidenceContext build_context(const std::map<int, PageClueReport>& reports,
                              const RetainedSet& retained, std::string question,
                              const std::map<int, ImageRef>& images);

PromptMode select_prompt_mode(const EvidenceContext& context);

/// Numbered evidence list with Page / Location / Content / Insight fields.
std::string render_evidence_summary(const std::vector<EvidenceRecord>& evidence);

/// Text that accompanies attached page images in the with-visuals prompt.
std::string render_visual_section(const EvidenceContext& context);

/// Structured-context block handed to the difficulty assessment prompt.
std::string render_structured_context(const EvidenceContext& context);

}  // namespace evidoc
