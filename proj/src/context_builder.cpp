// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/context_builder.hpp"

#include <sstream>

#include "evidoc/errors.hpp"

namespace evidoc {

namespace {

// Continuation lines line up under the field value.
std::string indent_continuations(const std::string& s) {
  std::string out;
  for (char c : s) {
    out += c;
    if (c == '\n') out += "   ";
  }
  return out;
}

std::string page_list(const std::vector<int>& pages) {
  std::string out;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (i) out += ", ";
    out += "Page " + std::to_string(pages[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(PromptMode m) {
  return m == PromptMode::kWithVisuals ? "with_visuals" : "text_only";
}

EvidenceContext build_context(const std::map<int, PageClueReport>& reports,
                              const RetainedSet& retained, std::string question,
                              const std::map<int, ImageRef>& images) {
  EvidenceContext ctx;
  ctx.question = std::move(question);
  for (const auto& [page, report] : reports) {
    if (report.page != page) {
      throw ContractViolation("clue report keyed by page " + std::to_string(page) +
                              " describes page " + std::to_string(report.page));
    }
    ctx.source_pages.push_back(page);
    for (const auto& rec : report.records) {
      if (rec.page != page) {
        throw ContractViolation("evidence record for page " + std::to_string(rec.page) +
                                " found in report for page " + std::to_string(page));
      }
      ctx.evidence.push_back(rec);
    }
  }
  ctx.retained_pages = retained;
  for (int page : retained.pages) {
    if (!reports.contains(page)) {
      throw ContractViolation("retained page " + std::to_string(page) +
                              " is not among the candidate pages");
    }
    auto it = images.find(page);
    if (it == images.end()) {
      throw ContractViolation("no image for retained page " + std::to_string(page));
    }
    ctx.retained_images.push_back(it->second);
  }
  return ctx;
}

PromptMode select_prompt_mode(const EvidenceContext& context) {
  return context.retained_pages.pages.empty() ? PromptMode::kTextOnly : PromptMode::kWithVisuals;
}

std::string render_evidence_summary(const std::vector<EvidenceRecord>& evidence) {
  if (evidence.empty()) return "(no evidence was found on the retrieved pages)";
  std::ostringstream out;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    const auto& e = evidence[i];
    if (i) out << "\n\n";
    out << i + 1 << ". Page: " << e.page << "\n"
        << "   Location: " << indent_continuations(e.region) << "\n"
        << "   Content: " << indent_continuations(e.content) << "\n"
        << "   Insight: " << indent_continuations(e.insight);
  }
  return out.str();
}

std::string render_visual_section(const EvidenceContext& context) {
  const auto n = context.retained_pages.pages.size();
  return "VISUAL EVIDENCE: " + std::to_string(n) + " page image" + (n == 1 ? "" : "s") +
         " attached (" + page_list(context.retained_pages.pages) + ").";
}

std::string render_structured_context(const EvidenceContext& context) {
  std::string out = "Retained page images: ";
  out += context.retained_pages.pages.empty() ? "none" : page_list(context.retained_pages.pages);
  out += "\nEvidence (from " + std::to_string(context.num_source_pages()) + " pages):\n";
  out += render_evidence_summary(context.evidence);
  return out;
}

}  // namespace evidoc
