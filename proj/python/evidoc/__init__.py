# SPDX-License-Identifier: Apache-2.0
"""Evidence-grounded question answering over page images."""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    ContractViolation,
    EvidocError,
    IndexFileError,
    import_jsonl,
    read_index,
    retrieve_top_k,
    score_item,
    score_page,
    write_index,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "EvidocError",
    "IndexFileError",
    "ask",
    "extract_json_object",
    "import_jsonl",
    "parse_clue_reply",
    "parse_screening_reply",
    "read_index",
    "render_evidence_summary",
    "retrieve_top_k",
    "score_item",
    "score_page",
    "write_index",
]


def extract_json_object(text):
    return _json.loads(_core.extract_json_object(text))


def parse_clue_reply(reply, page):
    return _json.loads(_core.parse_clue_reply(reply, page))


def parse_screening_reply(reply, page):
    return _json.loads(_core.parse_screening_reply(reply, page))


def render_evidence_summary(reports):
    return _core.render_evidence_summary(_json.dumps(list(reports)))


def ask(config, doc_id, question, mock_script="", run_dir="", k=None):
    """Runs the full pipeline and returns the answer bundle as a dict."""
    return _json.loads(_core.ask(str(config), doc_id, question, str(mock_script), str(run_dir), k))
