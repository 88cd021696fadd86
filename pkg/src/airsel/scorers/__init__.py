"""Similarity scorers and relevance analyzers behind two small interfaces."""

from .base import (
    MissingReplayEntry,
    RelevanceAnalyzer,
    RelevanceVerdict,
    ScorerDescriptor,
    ScorerError,
    ScorerTransportError,
    SimilarityScorer,
)
from .prompts import (
    PromptTemplates,
    extract_answer_letter,
    format_query,
    parse_verdict,
    render_analysis_prompt,
    render_answering_prompt,
)
from .replay import ReplayAnalyzer, ReplaySimilarity, ReplayStore, write_replay
from .remote import RemoteAnalyzer, RemoteAnswerer, RemoteSimilarity

__all__ = [
    "MissingReplayEntry",
    "PromptTemplates",
    "RelevanceAnalyzer",
    "RelevanceVerdict",
    "RemoteAnalyzer",
    "RemoteAnswerer",
    "RemoteSimilarity",
    "ReplayAnalyzer",
    "ReplaySimilarity",
    "ReplayStore",
    "ScorerDescriptor",
    "ScorerError",
    "ScorerTransportError",
    "SimilarityScorer",
    "analyze_batch",
    "extract_answer_letter",
    "format_query",
    "parse_verdict",
    "render_analysis_prompt",
    "render_answering_prompt",
    "write_replay",
]


def analyze_batch(query, frames, video_ref, analyzer: RelevanceAnalyzer):
    """One verdict per frame, order-aligned with ``frames``."""
    verdicts = analyzer.analyze(query, list(frames), video_ref)
    if len(verdicts) != len(frames) or any(v.frame != f for v, f in zip(verdicts, frames)):
        raise ScorerError("analyzer response is not aligned with the requested frames")
    return verdicts
