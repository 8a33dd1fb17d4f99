// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "evidoc/cli_app.hpp"
#include "evidoc/clue_discovery.hpp"
#include "evidoc/context_builder.hpp"
#include "evidoc/embedding_index.hpp"
#include "evidoc/errors.hpp"
#include "evidoc/eval_harness.hpp"
#include "evidoc/model_gateway.hpp"
#include "evidoc/page_screening.hpp"

namespace py = pybind11;
using namespace evidoc;

namespace {

using Rows = std::vector<std::vector<float>>;

Rows to_rows(const VectorSet& v) {
  Rows rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto r = v.row(i);
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

std::string_view kind_name(IndexFileError::Kind k) {
  switch (k) {
    case IndexFileError::Kind::kNotAnIndexFile: return "not_an_index_file";
    case IndexFileError::Kind::kVersionMismatch: return "version_mismatch";
    case IndexFileError::Kind::kCorruptHeader: return "corrupt_header";
    case IndexFileError::Kind::kTruncated: return "truncated";
    case IndexFileError::Kind::kIo: return "io";
  }
  return "unknown";
}

MultiVectorIndex make_index(const std::string& doc_id, const std::map<int, Rows>& pages,
                            bool l2_normalized) {
  std::size_t dim = 0;
  std::vector<PageEmbedding> out;
  for (const auto& [page, rows] : pages) {
    auto v = VectorSet::from_rows(rows);
    if (dim == 0) dim = v.dim();
    out.push_back({page, std::move(v)});
  }
  return MultiVectorIndex(doc_id, dim, std::move(out), l2_normalized);
}

py::dict index_to_dict(const MultiVectorIndex& index) {
  py::dict pages;
  for (const auto& p : index.pages()) pages[py::int_(p.page_index)] = to_rows(p.vectors);
  py::dict d;
  d["doc_id"] = index.doc_id();
  d["dim"] = index.dim();
  d["l2_normalized"] = index.l2_normalized();
  d["pages"] = pages;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of evidoc";

  static py::exception<Error> base(m, "EvidocError");
  static py::exception<ContractViolation> contract(m, "ContractViolation", base.ptr());
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<IndexFileError> index_error(m, "IndexFileError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IndexFileError& e) {
      PyErr_SetObject(index_error.ptr(),
                      py::make_tuple(e.what(), std::string(kind_name(e.kind()))).ptr());
    } catch (const ContractViolation& e) {
      contract(e.what());
    } catch (const ConfigError& e) {
      config(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.def("score_page",
        [](const Rows& query, const Rows& page) {
          return score_page(VectorSet::from_rows(query), {1, VectorSet::from_rows(page)}).score;
        },
        py::arg("query"), py::arg("page"));

  m.def("retrieve_top_k",
        [](const std::map<int, Rows>& pages, const Rows& query, std::size_t k) {
          std::vector<std::pair<int, double>> out;
          for (const auto& r : retrieve_top_k(make_index("", pages, false),
                                              VectorSet::from_rows(query), k)) {
            out.emplace_back(r.page_index, r.score);
          }
          return out;
        },
        py::arg("pages"), py::arg("query"), py::arg("k"));

  m.def("write_index",
        [](const std::filesystem::path& path, const std::string& doc_id,
           const std::map<int, Rows>& pages, bool l2_normalized) {
          write_index(make_index(doc_id, pages, l2_normalized), path);
        },
        py::arg("path"), py::arg("doc_id"), py::arg("pages"), py::arg("l2_normalized") = false);
  m.def("read_index", [](const std::filesystem::path& path) { return index_to_dict(read_index(path)); },
        py::arg("path"));
  m.def("import_jsonl",
        [](const std::filesystem::path& path, const std::string& doc_id) {
          return index_to_dict(import_jsonl(path, doc_id));
        },
        py::arg("path"), py::arg("doc_id") = "");

  m.def("extract_json_object",
        [](const std::string& text) { return extract_json_object(text).dump(); }, py::arg("text"));
  m.def("parse_clue_reply",
        [](const std::string& reply, int page) { return to_json(parse_clue_reply(reply, page)).dump(); },
        py::arg("reply"), py::arg("page"));
  m.def("parse_screening_reply",
        [](const std::string& reply, int page) {
          return to_json(parse_screening_reply(reply, page)).dump();
        },
        py::arg("reply"), py::arg("page"));

  m.def("render_evidence_summary",
        [](const std::string& reports_json) {
          std::vector<EvidenceRecord> evidence;
          std::map<int, PageClueReport> reports;
          for (const auto& r : nlohmann::json::parse(reports_json)) {
            auto report = clue_report_from_json(r);
            reports[report.page] = report;
          }
          return render_evidence_summary(collect_evidence(reports));
        },
        py::arg("reports_json"));

  m.def("score_item",
        [](const std::string& predicted, const std::string& gold, const std::string& answer_type,
           double float_tolerance) {
          EvalItem item;
          item.gold_answer = gold;
          item.answer_type = answer_type_from_string(answer_type);
          ScoringOptions opts;
          opts.float_tolerance = float_tolerance;
          return score_item(predicted, item, opts);
        },
        py::arg("predicted"), py::arg("gold"), py::arg("answer_type"),
        py::arg("float_tolerance") = 0.01);

  m.def("ask",
        [](const std::filesystem::path& config, const std::string& doc_id,
           const std::string& question, const std::filesystem::path& mock_script,
           const std::filesystem::path& run_dir, std::optional<std::size_t> k) {
          app::AskOptions o;
          o.config = config;
          o.doc_id = doc_id;
          o.question = question;
          o.mock_script = mock_script;
          o.run_dir = run_dir;
          o.k = k;
          o.json = true;
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = app::run_ask(o, out, err);
          }
          if (code != 0) throw Error(err.str());
          return out.str();
        },
        py::arg("config"), py::arg("doc_id"), py::arg("question"),
        py::arg("mock_script") = std::filesystem::path(),
        py::arg("run_dir") = std::filesystem::path(), py::arg("k") = std::nullopt);
}
