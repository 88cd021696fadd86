"""End-to-end frame selection for one query over one video."""

from __future__ import annotations

from dataclasses import dataclass

from .config import PipelineConfig
from .events import InitialFrameSet, initial_frame_set
from .scorers.base import RelevanceAnalyzer, SimilarityScorer
from .selection import SelectionResult, run_selection
from .signal import SimilaritySignal, VideoMeta, compute_budget, initial_sample_frames
from .thresholding import threshold_for_scores


@dataclass(frozen=True)
class PipelineRun:
    budget: int
    threshold: float
    initial: InitialFrameSet
    result: SelectionResult
    signal: SimilaritySignal
    initial_scored: int

    def to_dict(self) -> dict:
        out = self.result.to_dict()
        out["budget"] = self.budget
        out["threshold"] = self.threshold
        out["initial_frames"] = list(self.initial.frames)
        out["events"] = [[e.start, e.end] for e in self.initial.events]
        return out


def initial_signal(
    meta: VideoMeta, cfg: PipelineConfig, similarity: SimilarityScorer, query: str, video_ref: str
) -> SimilaritySignal:
    frames = initial_sample_frames(meta, cfg.budget_config())
    scores = similarity.score(query, frames, video_ref)
    return SimilaritySignal(meta.total_frames, dict(zip(frames, scores)))


def select_frames(
    query: str,
    meta: VideoMeta,
    cfg: PipelineConfig,
    similarity: SimilarityScorer,
    analyzer: RelevanceAnalyzer,
    video_ref: str = "",
    signal: SimilaritySignal | None = None,
) -> PipelineRun:
    """Adaptive initial sampling followed by iterative selection.

    ``signal`` may be passed pre-scored (e.g. by a harness); otherwise the
    ``sample_fps`` grid is scored with ``similarity``. The threshold is fit
    once, on the initial scores only.
    """
    budget, _ = compute_budget(meta, cfg.budget_config())
    if cfg.budget is not None:
        budget = cfg.budget
    if signal is None:
        signal = initial_signal(meta, cfg, similarity, query, video_ref)
    initial_scored = signal.known_count
    _, values = signal.window(1, meta.total_frames)
    threshold = threshold_for_scores(values, cfg.threshold_params())
    initial = initial_frame_set(signal, threshold, cfg.event_params(budget))
    result = run_selection(
        signal, meta, cfg.selection_config(budget), initial, similarity, analyzer, query, video_ref
    )
    return PipelineRun(budget, threshold, initial, result, signal, initial_scored)
