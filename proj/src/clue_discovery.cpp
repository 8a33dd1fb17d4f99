// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/clue_discovery.hpp"

#include <spdlog/spdlog.h>

#include "evidoc/errors.hpp"
#include "evidoc/fanout.hpp"
#include "text_util.hpp"

namespace evidoc {

namespace {

// Renders scalars as text; models sometimes emit numbers where strings belong.
std::string field_text(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) return {};
  const auto& v = obj[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += "; ";
      out += e.is_string() ? e.get<std::string>() : e.dump();
    }
    return out;
  }
  return v.dump();
}

std::optional<EvidenceType> parse_evidence_type(std::string_view s) {
  const auto v = text::squash(s);
  if (v == "text") return EvidenceType::kText;
  if (v == "chart") return EvidenceType::kChart;
  if (v == "table") return EvidenceType::kTable;
  if (v == "figure") return EvidenceType::kFigure;
  return std::nullopt;
}

std::optional<Confidence> parse_confidence(std::string_view s) {
  const auto v = text::squash(s);
  if (v == "high") return Confidence::kHigh;
  if (v == "medium") return Confidence::kMedium;
  if (v == "low") return Confidence::kLow;
  return std::nullopt;
}

void warn(PageClueReport& report, std::string msg) {
  spdlog::warn("clue discovery, page {}: {}", report.page, msg);
  report.warnings.push_back(std::move(msg));
}

PageClueReport degraded_report(int page_index, std::string why) {
  PageClueReport r;
  r.page = page_index;
  r.degraded = true;
  warn(r, std::move(why));
  return r;
}

}  // namespace

std::string_view to_string(EvidenceType t) {
  switch (t) {
    case EvidenceType::kText: return "text";
    case EvidenceType::kChart: return "chart";
    case EvidenceType::kTable: return "table";
    case EvidenceType::kFigure: return "figure";
  }
  return "figure";
}

std::string_view to_string(Confidence c) {
  switch (c) {
    case Confidence::kHigh: return "high";
    case Confidence::kMedium: return "medium";
    case Confidence::kLow: return "low";
  }
  return "low";
}

PageClueReport parse_clue_reply(std::string_view reply, int page_index) {
  nlohmann::json obj;
  try {
    obj = extract_json_object(reply);
  } catch (const ProtocolError& e) {
    return degraded_report(page_index, std::string("protocol error: ") + e.what());
  }

  PageClueReport report;
  report.page = page_index;
  report.page_summary = field_text(obj, "page_summary");
  report.key_insights = field_text(obj, "key_insights");

  if (obj.contains("page_number")) {
    const auto& claimed = obj["page_number"];
    if (!claimed.is_number_integer() || claimed.get<long long>() != page_index) {
      warn(report, "model reported page_number " + claimed.dump() + ", using " +
                       std::to_string(page_index));
    }
  }

  if (obj.contains("evidence_items") && !obj["evidence_items"].is_null()) {
    const auto& items = obj["evidence_items"];
    if (!items.is_array()) {
      return degraded_report(page_index, "protocol error: evidence_items is not an array");
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& item = items[i];
      if (!item.is_object()) {
        warn(report, "evidence item " + std::to_string(i) + " is not an object; dropped");
        continue;
      }
      EvidenceRecord rec;
      rec.page = page_index;
      rec.content = field_text(item, "content");
      if (text::trim(rec.content).empty()) {
        warn(report, "evidence item " + std::to_string(i) + " has no content; dropped");
        continue;
      }
      rec.region = field_text(item, "location");
      rec.rationale = field_text(item, "relevance");
      // Items carry no insight of their own in the reply schema; fall back to
      // the page-level insight.
      rec.insight = item.contains("insight") ? field_text(item, "insight") : report.key_insights;

      const auto type_text = field_text(item, "evidence_type");
      if (auto t = parse_evidence_type(type_text)) {
        rec.evidence_type = *t;
      } else {
        rec.evidence_type = EvidenceType::kFigure;
        warn(report, "unknown evidence_type '" + type_text + "' mapped to figure");
      }
      const auto conf_text = field_text(item, "confidence");
      if (auto c = parse_confidence(conf_text)) {
        rec.confidence = *c;
      } else {
        rec.confidence = Confidence::kLow;
        warn(report, "unknown confidence '" + conf_text + "' mapped to low");
      }
      report.records.push_back(std::move(rec));
    }
  }

  report.has_relevant_evidence = !report.records.empty();
  if (obj.contains("has_relevant_evidence") && obj["has_relevant_evidence"].is_boolean() &&
      obj["has_relevant_evidence"].get<bool>() != report.has_relevant_evidence) {
    warn(report, "has_relevant_evidence disagrees with evidence_items; using item count");
  }
  return report;
}

ChatRequest clue_request(const ImageRef& page, const std::string& question,
                         const PromptTemplates& templates) {
  ChatRequest req;
  req.model_class = ModelClass::kOrdinary;
  req.text_parts.push_back(render_template(
      templates.clue_discovery, {{"question", question}, {"page_num", std::to_string(page.page)}}));
  req.image_parts.push_back(page);
  req.purpose = "clue_discovery";
  req.page = page.page;
  return req;
}

PageClueReport discover(const ImageRef& page, const std::string& question, Gateway& gateway,
                        const PromptTemplates& templates) {
  const auto resp = gateway.complete(clue_request(page, question, templates));
  return parse_clue_reply(resp.text, page.page);
}

std::map<int, PageClueReport> discover_all(std::span<const ImageRef> pages,
                                           const std::string& question, Gateway& gateway,
                                           const PromptTemplates& templates) {
  if (pages.empty()) throw ContractViolation("discover_all needs at least one page");
  std::vector<PageClueReport> reports(pages.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    tasks.emplace_back([&, i] {
      try {
        reports[i] = discover(pages[i], question, gateway, templates);
      } catch (const Error& e) {
        reports[i] = degraded_report(pages[i].page, std::string("backend failure: ") + e.what());
      }
    });
  }
  run_tasks(tasks, gateway.config().concurrency);

  std::map<int, PageClueReport> out;
  for (auto& r : reports) {
    const int page = r.page;
    if (!out.emplace(page, std::move(r)).second) {
      throw ContractViolation("duplicate page " + std::to_string(page) + " in discover_all");
    }
  }
  return out;
}

std::vector<EvidenceRecord> collect_evidence(const std::map<int, PageClueReport>& reports) {
  std::vector<EvidenceRecord> all;
  for (const auto& [_, r] : reports) all.insert(all.end(), r.records.begin(), r.records.end());
  return all;
}

nlohmann::json to_json(const EvidenceRecord& r) {
  return {{"page", r.page},
          {"region", r.region},
          {"content", r.content},
          {"insight", r.insight},
          {"rationale", r.rationale},
          {"evidence_type", to_string(r.evidence_type)},
          {"confidence", to_string(r.confidence)}};
}

nlohmann::json to_json(const PageClueReport& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  return {{"page", r.page},
          {"has_relevant_evidence", r.has_relevant_evidence},
          {"records", std::move(records)},
          {"page_summary", r.page_summary},
          {"key_insights", r.key_insights},
          {"degraded", r.degraded},
          {"warnings", r.warnings}};
}

PageClueReport clue_report_from_json(const nlohmann::json& j) {
  PageClueReport r;
  r.page = j.at("page").get<int>();
  r.has_relevant_evidence = j.at("has_relevant_evidence").get<bool>();
  r.page_summary = j.value("page_summary", "");
  r.key_insights = j.value("key_insights", "");
  r.degraded = j.value("degraded", false);
  r.warnings = j.value("warnings", std::vector<std::string>{});
  for (const auto& rj : j.at("records")) {
    EvidenceRecord rec;
    rec.page = rj.at("page").get<int>();
    rec.region = rj.value("region", "");
    rec.content = rj.at("content").get<std::string>();
    rec.insight = rj.value("insight", "");
    rec.rationale = rj.value("rationale", "");
    rec.evidence_type = parse_evidence_type(rj.at("evidence_type").get<std::string>())
                            .value_or(EvidenceType::kFigure);
    rec.confidence =
        parse_confidence(rj.at("confidence").get<std::string>()).value_or(Confidence::kLow);
    r.records.push_back(std::move(rec));
  }
  return r;
}

}  // namespace evidoc
