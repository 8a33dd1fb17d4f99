// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "evidoc/errors.hpp"
#include "evidoc/fanout.hpp"
#include "evidoc/prompts.hpp"
#include "text_util.hpp"

namespace evidoc {

namespace {

constexpr std::string_view kEdgePunct = " \t\r\n\"'`*.,;:!?";

std::string norm_str(std::string_view s) {
  auto v = text::squash(s);
  const auto b = v.find_first_not_of(kEdgePunct);
  if (b == std::string::npos) return {};
  const auto e = v.find_last_not_of(kEdgePunct);
  return v.substr(b, e - b + 1);
}

// Strict: the whole string must be one number, allowing $, %, and thousands
// separators.
std::optional<double> parse_number_strict(std::string_view s) {
  std::string t(text::trim(s));
  while (!t.empty() && (t.back() == '%' || t.back() == '.')) t.pop_back();
  if (!t.empty() && t.front() == '$') t.erase(0, 1);
  static const std::regex number(R"(^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?$)");
  if (!std::regex_match(t, number)) return std::nullopt;
  t.erase(std::remove(t.begin(), t.end(), ','), t.end());
  return std::strtod(t.c_str(), nullptr);
}

// Whole-string parse first, then the first number appearing in the text.
std::optional<double> parse_number_loose(std::string_view s) {
  if (auto v = parse_number_strict(s)) return v;
  static const std::regex token(R"([+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(s.begin(), s.end(), m, token)) return std::nullopt;
  return parse_number_strict(m.str());
}

std::optional<long long> as_integer(std::optional<double> v) {
  if (!v || std::floor(*v) != *v || std::fabs(*v) > 9e15) return std::nullopt;
  return static_cast<long long>(*v);
}

std::vector<std::string> split_quoted(std::string_view inner) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : inner) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_any(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string_view::npos) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_bullet(std::string_view line) {
  auto t = text::trim(line);
  if (t.starts_with("\xE2\x80\xA2")) t = t.substr(3);
  if (!t.empty() && (t.front() == '-' || t.front() == '*')) t = t.substr(1);
  std::size_t d = 0;
  while (d < t.size() && std::isdigit(static_cast<unsigned char>(t[d]))) ++d;
  if (d > 0 && d < t.size() && (t[d] == '.' || t[d] == ')')) t = t.substr(d + 1);
  return std::string(text::trim(t));
}

std::set<std::string> parse_list(std::string_view raw) {
  const auto t = text::trim(raw);
  std::vector<std::string> parts;
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
    auto j = nlohmann::json::parse(t, nullptr, false);
    if (!j.is_discarded() && j.is_array()) {
      for (const auto& e : j) parts.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      parts = split_quoted(t.substr(1, t.size() - 2));
    }
  } else if (t.find('\n') != std::string_view::npos) {
    for (const auto& line : split_any(t, "\n")) parts.push_back(strip_bullet(line));
  } else {
    parts = split_any(t, ",;");
    if (parts.size() == 1) {
      static const std::regex and_sep(R"(\s+and\s+)", std::regex::icase);
      const std::string one = parts.front();
      parts.assign(std::sregex_token_iterator(one.begin(), one.end(), and_sep, -1),
                   std::sregex_token_iterator());
    }
  }
  std::set<std::string> out;
  for (const auto& p : parts) {
    auto n = norm_str(p);
    if (!n.empty()) out.insert(std::move(n));
  }
  return out;
}

bool encodes_unanswerable(std::string_view gold) {
  const auto n = norm_str(gold);
  return n == "not answerable" || n == "no answers found" || n == "unanswerable" ||
         n == "none" || n.empty();
}

void validate_gold(const EvalItem& item) {
  const bool unanswerable_gold = encodes_unanswerable(item.gold_answer);
  if (item.answer_type == AnswerType::kNone) {
    if (!unanswerable_gold) throw InvalidGold("None-type gold must encode an unanswerable item");
    return;
  }
  if (norm_str(item.gold_answer) == "not answerable" || text::trim(item.gold_answer).empty()) {
    throw InvalidGold("unanswerable gold on an item whose type is not None");
  }
  switch (item.answer_type) {
    case AnswerType::kInt:
      if (!as_integer(parse_number_strict(item.gold_answer))) {
        throw InvalidGold("gold '" + item.gold_answer + "' is not an integer");
      }
      break;
    case AnswerType::kFloat:
      if (!parse_number_strict(item.gold_answer)) {
        throw InvalidGold("gold '" + item.gold_answer + "' is not a number");
      }
      break;
    case AnswerType::kList:
      if (parse_list(item.gold_answer).empty()) throw InvalidGold("gold list is empty");
      break;
    default:
      break;
  }
}

ItemResult score_one(const EvalItem& item, const std::string& predicted,
                     const ScoringOptions& options) {
  ItemResult r{item.question_id, item.category, predicted, false, ItemStatus::kScored, {}};
  try {
    r.correct = score_item(predicted, item, options);
  } catch (const InvalidGold& e) {
    r.status = ItemStatus::kInvalid;
    r.reason = e.what();
  }
  return r;
}

ScoreReport aggregate(std::vector<ItemResult> results) {
  ScoreReport rep;
  rep.items = std::move(results);
  for (const auto& r : rep.items) {
    if (r.status == ItemStatus::kInvalid) {
      ++rep.invalid;
      spdlog::warn("item {} excluded: {}", r.question_id, r.reason);
      continue;
    }
    if (r.status == ItemStatus::kError) {
      ++rep.errored;
      continue;
    }
    ++rep.scored;
    auto& cat = rep.per_category[r.category];
    ++cat.items;
    if (r.correct) {
      ++rep.correct;
      ++cat.correct;
    }
  }
  for (auto& [_, c] : rep.per_category) c.accuracy = 100.0 * c.correct / c.items;
  rep.overall = rep.scored == 0 ? 0.0 : 100.0 * rep.correct / rep.scored;
  return rep;
}

std::string_view status_name(ItemStatus s) {
  switch (s) {
    case ItemStatus::kScored: return "scored";
    case ItemStatus::kInvalid: return "invalid";
    case ItemStatus::kError: return "error";
  }
  return "error";
}

constexpr std::string_view kJudgePrompt =
    "Extract the short answer to the question from the response below. Reply with the short "
    "answer only, without explanation. If the response states that no answer was found, reply "
    "exactly: No answers found!\n\nQuestion: {question}\nExpected answer type: {answer_type}\n"
    "Response: {response}\n\nShort answer:";

}  // namespace

std::string_view to_string(AnswerType t) {
  switch (t) {
    case AnswerType::kInt: return "Int";
    case AnswerType::kFloat: return "Float";
    case AnswerType::kStr: return "Str";
    case AnswerType::kList: return "List";
    case AnswerType::kNone: return "None";
  }
  return "Str";
}

AnswerType answer_type_from_string(std::string_view s) {
  const auto v = text::lower(text::trim(s));
  if (v == "int" || v == "integer") return AnswerType::kInt;
  if (v == "float") return AnswerType::kFloat;
  if (v == "str" || v == "string") return AnswerType::kStr;
  if (v == "list") return AnswerType::kList;
  if (v == "none") return AnswerType::kNone;
  throw ContractViolation("unknown answer_type '" + std::string(s) + "'");
}

bool score_item(std::string_view predicted, const EvalItem& item, const ScoringOptions& options) {
  validate_gold(item);
  if (text::trim(predicted).empty()) return false;

  switch (item.answer_type) {
    case AnswerType::kNone: {
      const auto p = text::trim(predicted);
      return std::any_of(options.unanswerable_markers.begin(), options.unanswerable_markers.end(),
                         [&](const std::string& m) { return p == m; });
    }
    case AnswerType::kInt: {
      const auto gold = as_integer(parse_number_strict(item.gold_answer));
      const auto pred = as_integer(parse_number_loose(predicted));
      return pred && *pred == *gold;
    }
    case AnswerType::kFloat: {
      const double gold = *parse_number_strict(item.gold_answer);
      const auto pred = parse_number_loose(predicted);
      if (!pred) return false;
      if (gold == 0.0) return std::fabs(*pred) <= 1e-12;
      return std::fabs(*pred - gold) <= options.float_tolerance * std::fabs(gold);
    }
    case AnswerType::kStr: {
      const auto gold = norm_str(item.gold_answer);
      const auto pred = norm_str(predicted);
      return !gold.empty() && (pred == gold || pred.find(gold) != std::string::npos);
    }
    case AnswerType::kList:
      return parse_list(predicted) == parse_list(item.gold_answer);
  }
  return false;
}

std::vector<EvalItem> parse_items(std::istream& in) {
  std::vector<EvalItem> items;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fail = [&](const std::string& msg) {
      return ContractViolation("items line " + std::to_string(line_no) + ": " + msg);
    };
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw fail("not a JSON object");
    EvalItem it;
    try {
      it.question_id = j.at("question_id").get<std::string>();
      it.doc_id = j.at("doc_id").get<std::string>();
      it.question = j.at("question").get<std::string>();
      const auto& gold = j.at("gold_answer");
      it.gold_answer = gold.is_string() ? gold.get<std::string>() : gold.dump();
      it.answer_type = answer_type_from_string(j.at("answer_type").get<std::string>());
      it.category = j.value("category", "Uncategorized");
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    } catch (const ContractViolation& e) {
      throw fail(e.what());
    }
    if (!ids.insert(it.question_id).second) throw fail("duplicate question_id " + it.question_id);
    items.push_back(std::move(it));
  }
  return items;
}

std::vector<EvalItem> load_items(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open items file " + path.string());
  return parse_items(in);
}

ScoreReport run_eval(const std::vector<EvalItem>& items, const AnswerFn& answer,
                     const EvalOptions& options) {
  std::vector<ItemResult> results(items.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < items.size(); ++i) {
    tasks.emplace_back([&, i] {
      const auto& item = items[i];
      auto& r = results[i];
      r.question_id = item.question_id;
      r.category = item.category;
      try {
        validate_gold(item);
      } catch (const InvalidGold& e) {
        r.status = ItemStatus::kInvalid;
        r.reason = e.what();
        return;
      }
      std::string raw;
      try {
        raw = answer(item);
        // Unanswerable items are judged on the sentinel alone.
        if (options.extract && item.answer_type != AnswerType::kNone) {
          raw = options.extract(item, raw);
        }
      } catch (const std::exception& e) {
        r.status = ItemStatus::kError;
        r.reason = e.what();
        spdlog::error("item {} failed: {}", item.question_id, e.what());
        return;
      }
      r = score_one(item, raw, options.scoring);
    });
  }
  run_tasks(tasks, options.concurrency);
  return aggregate(std::move(results));
}

ScoreReport score_predictions(const std::vector<EvalItem>& items,
                              const std::map<std::string, std::string>& predictions,
                              const EvalOptions& options) {
  return run_eval(
      items,
      [&](const EvalItem& item) -> std::string {
        auto it = predictions.find(item.question_id);
        if (it == predictions.end()) throw Error("no prediction for " + item.question_id);
        return it->second;
      },
      options);
}

ExtractFn make_judge_extractor(Gateway& gateway) {
  return [&gateway](const EvalItem& item, const std::string& raw) {
    ChatRequest req;
    req.model_class = ModelClass::kOrdinary;
    req.text_parts.push_back(render_template(kJudgePrompt,
                                             {{"question", item.question},
                                              {"answer_type", std::string(to_string(item.answer_type))},
                                              {"response", raw}}));
    req.purpose = "answer_extraction";
    return std::string(text::trim(gateway.complete(std::move(req)).text));
  };
}

nlohmann::json to_json(const ScoreReport& report) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : report.items) {
    nlohmann::json j = {{"question_id", r.question_id},
                        {"category", r.category},
                        {"predicted", r.predicted},
                        {"correct", r.correct},
                        {"status", status_name(r.status)}};
    if (!r.reason.empty()) j["reason"] = r.reason;
    items.push_back(std::move(j));
  }
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [name, c] : report.per_category) {
    cats[name] = {{"items", c.items}, {"correct", c.correct}, {"accuracy", c.accuracy}};
  }
  return {{"scoring", "harness rule-based"},
          {"items", std::move(items)},
          {"per_category", std::move(cats)},
          {"scored", report.scored},
          {"correct", report.correct},
          {"overall", report.overall},
          {"invalid", report.invalid},
          {"errored", report.errored}};
}

std::string format_table(const ScoreReport& report) {
  std::size_t width = std::string_view("Overall").size();
  for (const auto& [name, _] : report.per_category) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  auto row = [&](std::string_view name, int n, int correct, double acc) {
    std::snprintf(buf, sizeof buf, "%-*.*s  %7d  %7d  %8.2f\n", static_cast<int>(width),
                  static_cast<int>(name.size()), name.data(), n, correct, acc);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%-*s  %7s  %7s  %8s\n", static_cast<int>(width), "Category",
                "Items", "Correct", "Acc(%)");
  out += buf;
  out += std::string(width + 28, '-') + "\n";
  for (const auto& [name, c] : report.per_category) row(name, c.items, c.correct, c.accuracy);
  out += std::string(width + 28, '-') + "\n";
  row("Overall", report.scored, report.correct, report.overall);
  if (report.invalid || report.errored) {
    std::snprintf(buf, sizeof buf, "(%d invalid, %d errored items excluded)\n", report.invalid,
                  report.errored);
    out += buf;
  }
  return out;
}

}  // namespace evidoc
