"""Analyzer/answerer prompt templates and parsing of their free-text replies."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .base import RelevanceVerdict

QUERY_SLOT = "{QUERY}"

ANALYSIS_TEMPLATE = """\
You are an expert visual reasoner. Step by step analyze how well this image matches the following query (with options):
{QUERY}

Rate the relevance from 1 to 5, using these exact definitions:
1 - Not relevant at all: no relation between image content and the query.
2 - Slightly relevant: only minor contextual hints, but not central to answering.
3 - Moderately relevant: contains preparatory or follow-up context (e.g., setup actions) related to the query.
4 - Highly relevant: shows clear evidence to support the query, but still has ambiguity or missing details.
5 - Perfectly matches: fully sufficient and unambiguous evidence to answer the query.

Avoid overthinking. Trust your immediate judgment.

Examples:
- Image of an empty room (no people or objects) -> Reasoning: There is nothing related to the query. Score: 1
- Image showing exactly the queried action (clear, direct match) -> Reasoning: It perfectly depicts the required event. Score: 5

Respond only in this format:
Score: <1-5>
Reasoning: <A brief one-sentence justification>
"""

ANSWERING_TEMPLATE = """\
Select the best answer to the following multiple-choice question based on the video and the subtitles. Respond with only the letter ({LETTERS}) of the correct option.

{QUERY}
"""

OPTION_LETTERS = "ABCDE"

_SCORE_RE = re.compile(r"Score:\s*([1-5])(?![0-9])")
_REASONING_RE = re.compile(r"Reasoning:\s*(.*)", re.DOTALL)
_TRAILING_SCORE_RE = re.compile(r"\s*Score:\s*\S*\s*$")
_LETTER_RE = re.compile(r"(?<![A-Za-z0-9])([A-E])(?![A-Za-z0-9])")


@dataclass(frozen=True)
class PromptTemplates:
    analysis_template: str = ANALYSIS_TEMPLATE
    answering_template: str = ANSWERING_TEMPLATE

    def __post_init__(self) -> None:
        for name in ("analysis_template", "answering_template"):
            if QUERY_SLOT not in getattr(self, name):
                raise ValueError(f"{name} has no {QUERY_SLOT} slot")


def _substitute(template: str, query: str) -> str:
    # single pass; braces inside the query are never re-expanded
    head, _, tail = template.partition(QUERY_SLOT)
    return head + query + tail


def render_analysis_prompt(templates: PromptTemplates, query_with_options: str) -> str:
    if not query_with_options or not query_with_options.strip():
        raise ValueError("query must be non-empty")
    return _substitute(templates.analysis_template, query_with_options)


def format_query(question: str, options: Sequence[str] = ()) -> str:
    if not options:
        return question
    if not 2 <= len(options) <= len(OPTION_LETTERS):
        raise ValueError(f"expected 2-5 options, got {len(options)}")
    lines = [question] + [f"{OPTION_LETTERS[i]}. {opt}" for i, opt in enumerate(options)]
    return "\n".join(lines)


def render_answering_prompt(templates: PromptTemplates, query_with_options: str, n_options: int = 4) -> str:
    if not query_with_options or not query_with_options.strip():
        raise ValueError("query must be non-empty")
    letters = list(OPTION_LETTERS[: max(2, min(n_options, 5))])
    spelled = ", ".join(letters[:-1]) + (", or " if len(letters) > 2 else " or ") + letters[-1]
    return _substitute(templates.answering_template.replace("{LETTERS}", spelled), query_with_options)


def parse_verdict(raw: str, frame: int, positive_threshold: int = 3) -> RelevanceVerdict:
    """Read ``Score: <1-5>`` and ``Reasoning: ...`` from analyzer output.

    The first line holding a valid score wins, wherever the marker sits in
    the line. Unparseable output yields a neutral rating with ``parse_ok``
    false.
    """
    rating = None
    for line in (raw or "").splitlines():
        m = _SCORE_RE.search(line)
        if m:
            rating = int(m.group(1))
            break
    reasoning = ""
    m = _REASONING_RE.search(raw or "")
    if m:
        first = m.group(1).split("\nScore:")[0]
        reasoning = _TRAILING_SCORE_RE.sub("", first).strip()
    if rating is None:
        return RelevanceVerdict(frame, positive_threshold, reasoning, parse_ok=False)
    return RelevanceVerdict(frame, rating, reasoning, parse_ok=True)


def extract_answer_letter(raw: str) -> str | None:
    """First standalone capital letter A-E in an answerer reply."""
    m = _LETTER_RE.search(raw or "")
    return m.group(1) if m else None
