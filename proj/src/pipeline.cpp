// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <fstream>
#include <sstream>

#include "evidoc/core_decision.hpp"
#include "evidoc/errors.hpp"
#include "evidoc/fanout.hpp"

namespace evidoc {

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, std::nullopt, e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string context_dump(const RunRecord& run) {
  const auto& ctx = run.context;
  std::ostringstream out;
  auto list = [&](const std::vector<int>& pages) {
    if (pages.empty()) return std::string("none");
    std::string s;
    for (std::size_t i = 0; i < pages.size(); ++i) s += (i ? ", " : "") + std::to_string(pages[i]);
    return s;
  };
  out << "question: " << ctx.question << "\n"
      << "prompt_mode: " << to_string(run.decision_prompt.mode) << "\n"
      << "candidate_pages: " << list(ctx.source_pages) << "\n"
      << "retained_pages: " << list(ctx.retained_pages.pages) << "\n"
      << "evidence_records: " << ctx.evidence.size() << "\n"
      << "images:\n";
  for (const auto& img : run.decision_prompt.images) {
    out << "  page " << img.page << ": " << img.uri << "\n";
  }
  out << "\n--- decision prompt ---\n" << run.decision_prompt.text;
  if (!run.decision_prompt.text.ends_with('\n')) out << "\n";
  return out.str();
}

}  // namespace

RunRecord run_pipeline(const MultiVectorIndex& index, const QueryEmbedding& query,
                       const std::string& question, std::size_t k, Gateway& gateway,
                       const PromptTemplates& templates, const ImageResolver& images) {
  RunRecord run;
  run.doc_id = index.doc_id();
  run.question = question;
  run.query = query;
  run.k = k;

  run.retrieval = in_stage("retrieval", [&] { return retrieve_top_k(index, query, k); });

  std::vector<ImageRef> pages;
  std::map<int, ImageRef> by_page;
  for (const auto& s : run.retrieval) {
    auto img = in_stage("page_images", [&] { return images(s.page_index); });
    img.page = s.page_index;
    by_page[s.page_index] = img;
  }
  for (const auto& [_, img] : by_page) pages.push_back(img);

  // Clue discovery and screening are independent per page; interleave them so
  // both agents see page i before page i+1 when running sequentially.
  std::vector<std::map<int, PageClueReport>> clue_parts(pages.size());
  std::vector<std::map<int, ScreeningVerdict>> verdict_parts(pages.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    std::span<const ImageRef> one(&pages[i], 1);
    tasks.emplace_back([&, one, i] {
      clue_parts[i] = discover_all(one, question, gateway, templates);
    });
    tasks.emplace_back([&, one, i] {
      verdict_parts[i] = screen_all(one, question, gateway, templates);
    });
  }
  in_stage("evidence_collection", [&] {
    run_tasks(tasks, gateway.config().concurrency);
    return 0;
  });
  for (auto& part : clue_parts) run.clues.merge(part);
  for (auto& part : verdict_parts) run.verdicts.merge(part);

  run.context = in_stage("context_builder", [&] {
    return build_context(run.clues, build_retained_set(run.verdicts), question, by_page);
  });
  run.difficulty = in_stage("difficulty_assessment",
                            [&] { return assess(question, run.context, gateway, templates); });
  run.decision_prompt = render_decision_prompt(run.context, run.difficulty, templates);
  run.answer = in_stage("core_decision",
                        [&] { return decide(run.context, run.difficulty, gateway, templates); });
  return run;
}

void write_run_directory(const RunRecord& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  nlohmann::json vectors = nlohmann::json::array();
  for (std::size_t t = 0; t < run.query.size(); ++t) {
    const auto r = run.query.row(t);
    vectors.push_back(std::vector<float>(r.begin(), r.end()));
  }
  write_file(dir / "query.json", nlohmann::json{{"doc_id", run.doc_id},
                                                {"question", run.question},
                                                {"k", run.k},
                                                {"query_vectors", std::move(vectors)}}
                                         .dump(2) + "\n");

  nlohmann::json results = nlohmann::json::array();
  for (const auto& s : run.retrieval) {
    results.push_back({{"page_index", s.page_index}, {"score", s.score}});
  }
  write_file(dir / "retrieval.json",
             nlohmann::json{{"k", run.k}, {"results", std::move(results)}}.dump(2) + "\n");

  std::string clues;
  for (const auto& [_, r] : run.clues) clues += to_json(r).dump() + "\n";
  write_file(dir / "clues.jsonl", clues);

  std::string verdicts;
  for (const auto& [_, v] : run.verdicts) verdicts += to_json(v).dump() + "\n";
  write_file(dir / "verdicts.jsonl", verdicts);

  write_file(dir / "context.txt", context_dump(run));
  write_file(dir / "decision.json", to_json(run.difficulty).dump(2) + "\n");
  write_file(dir / "answer.json", to_json(run.answer).dump(2) + "\n");
}

}  // namespace evidoc
