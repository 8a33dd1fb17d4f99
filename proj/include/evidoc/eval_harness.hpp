// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidoc/model_gateway.hpp"

namespace evidoc {

enum class AnswerType { kInt, kFloat, kStr, kList, kNone };

std::string_view to_string(AnswerType t);
AnswerType answer_type_from_string(std::string_view s);

struct EvalItem {
  std::string question_id;
  std::string doc_id;
  std::string question;
  std::string gold_answer;
  AnswerType answer_type = AnswerType::kStr;
  std::string category;
};

struct ScoringOptions {
  double float_tolerance = 0.01;  // relative
  std::vector<std::string> unanswerable_markers{"No answers found!"};
};

/// Gold answer does not fit its declared type; the item is excluded from scoring.
class InvalidGold : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Type-directed rule-based match.
///   Int   - integer equality after stripping thousands separators
///   Float - |pred - gold| <= tolerance * |gold|
///   Str   - normalized equality, or normalized gold contained in prediction
///   List  - set equality of normalized elements
///   None  - prediction is one of the unanswerable markers
/// Throws InvalidGold when the gold answer cannot be read as its type.
bool score_item(std::string_view predicted, const EvalItem& item,
                const ScoringOptions& options = {});

/// Reads a JSON-lines items file. Throws ContractViolation naming the line.
std::vector<EvalItem> load_items(const std::filesystem::path& path);
std::vector<EvalItem> parse_items(std::istream& in);

enum class ItemStatus { kScored, kInvalid, kError };

struct ItemResult {
  std::string question_id;
  std::string category;
  std::string predicted;
  bool correct = false;
  ItemStatus status = ItemStatus::kScored;
  std::string reason;  // for kInvalid / kError
};

struct CategoryScore {
  int items = 0;
  int correct = 0;
  double accuracy = 0.0;  // percent
};

struct ScoreReport {
  std::vector<ItemResult> items;  // input order
  std::map<std::string, CategoryScore> per_category;
  int scored = 0;
  int correct = 0;
  double overall = 0.0;  // percent over scored items
  int invalid = 0;
  int errored = 0;
};

/// Produces the raw answer for an item; may throw (recorded as an item error).
using AnswerFn = std::function<std::string(const EvalItem&)>;
/// Optional short-answer extraction applied before scoring.
using ExtractFn = std::function<std::string(const EvalItem&, const std::string& raw)>;

struct EvalOptions {
  ScoringOptions scoring;
  int concurrency = 1;
  ExtractFn extract;  // identity when empty
};

ScoreReport run_eval(const std::vector<EvalItem>& items, const AnswerFn& answer,
                     const EvalOptions& options = {});

/// Scores pre-computed predictions keyed by question_id.
ScoreReport score_predictions(const std::vector<EvalItem>& items,
                              const std::map<std::string, std::string>& predictions,
                              const EvalOptions& options = {});

/// Judge-model short-answer extraction through the gateway (ordinary class).
ExtractFn make_judge_extractor(Gateway& gateway);

nlohmann::json to_json(const ScoreReport& report);
std::string format_table(const ScoreReport& report);

}  // namespace evidoc
