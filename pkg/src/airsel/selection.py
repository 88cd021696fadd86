"""Iterative frame selection: interval ranking, analyzer validation, early stop and
localized density sampling around validated frames."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .events import InitialFrameSet
from .scorers.base import RelevanceAnalyzer, RelevanceVerdict, ScorerTransportError, SimilarityScorer
from .signal import SimilaritySignal, VideoMeta, round_half_away, top_by_score, window_stats

log = logging.getLogger(__name__)


class EmptyCandidates(RuntimeError):
    """Every pooled frame has already been analyzed."""


@dataclass(frozen=True)
class LdsConfig:
    alpha_frac: float = 0.05
    alpha_min: float = 15.0
    beta: float = 1.5
    depth_cap: int = 4

    def __post_init__(self) -> None:
        if self.beta <= 1:
            raise ValueError(f"beta must be > 1, got {self.beta}")
        if self.alpha_min < 1:
            raise ValueError(f"alpha_min must be >= 1, got {self.alpha_min}")
        if self.depth_cap < 1:
            raise ValueError("depth_cap must be >= 1")


@dataclass(frozen=True)
class SelectionConfig:
    budget: int
    candidate_batch: int = 12
    max_iterations: int = 6
    positive_threshold: int = 3
    length_coef: float = 1.0
    lds: LdsConfig = field(default_factory=LdsConfig)

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.candidate_batch < 1:
            raise ValueError("candidate_batch must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 1 <= self.positive_threshold <= 5:
            raise ValueError("positive_threshold must be in [1, 5]")

    @property
    def fallback_quota(self) -> int:
        return self.budget // self.max_iterations


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int
    potential: float = 0.0

    @property
    def span(self) -> int:
        return self.hi - self.lo


@dataclass
class SelectionState:
    pool: set[int]
    validated: set[int] = field(default_factory=set)
    final: set[int] = field(default_factory=set)
    analyzed: set[int] = field(default_factory=set)
    iteration: int = 0


@dataclass(frozen=True)
class WorkloadStats:
    analyzed_count: int
    w_best: int
    w_worst: int
    iterations_run: int
    early_stopped: bool
    similarity_frames_scored: int = 0

    def within_bounds(self) -> bool:
        return self.w_best <= self.analyzed_count <= self.w_worst

    def to_dict(self) -> dict:
        return {
            "n_air": self.analyzed_count,
            "w_best": self.w_best,
            "w_worst": self.w_worst,
            "iterations": self.iterations_run,
            "early_stopped": self.early_stopped,
            "similarity_frames_scored": self.similarity_frames_scored,
        }


@dataclass(frozen=True)
class SelectionResult:
    frames: tuple[int, ...]
    stats: WorkloadStats
    per_frame_verdicts: Mapping[int, RelevanceVerdict]

    def to_dict(self) -> dict:
        return {
            "frames": list(self.frames),
            "stats": self.stats.to_dict(),
            "verdicts": {str(f): self.per_frame_verdicts[f].to_dict() for f in sorted(self.per_frame_verdicts)},
        }


@dataclass(frozen=True)
class CandidateBatch:
    frames: tuple[int, ...]
    # span of the highest-ranked interval each frame was collected from
    source_span: Mapping[int, int]


def partition_intervals(pool: Sequence[int], total_frames: int) -> list[Interval]:
    """``[1, f1], [f1, f2], ..., [fK, N]`` over the sorted pool."""
    frames = sorted(set(pool))
    if not frames:
        raise ValueError("pool must be non-empty")
    bounds = [1, *frames, total_frames]
    return [Interval(a, b) for a, b in zip(bounds, bounds[1:])]


def interval_potential(iv: Interval, signal: SimilaritySignal, length_coef: float = 1.0) -> float:
    """Relevance x complexity x length of the known scores inside the interval.

    Relevance is the window mean, complexity ``1 + TV / span`` and length
    ``1 + c_len * log10(span)``; both of the latter are 1 when ``span <= 1``.
    """
    stats = window_stats(signal, iv.lo, iv.hi)
    if stats.known_count == 0:
        return 0.0
    span = iv.hi - iv.lo
    if span <= 1:
        return stats.mean
    return stats.mean * (1.0 + stats.total_variation / span) * (1.0 + length_coef * math.log10(span))


def rank_intervals(intervals: Sequence[Interval], signal: SimilaritySignal, length_coef: float) -> list[Interval]:
    scored = [Interval(iv.lo, iv.hi, interval_potential(iv, signal, length_coef)) for iv in intervals]
    return sorted(scored, key=lambda iv: (-iv.potential, iv.lo))


def pick_candidates(
    ranked: Sequence[Interval], pool: set[int], analyzed: set[int], batch_size: int
) -> CandidateBatch:
    picked: dict[int, int] = {}
    for iv in ranked:
        for f in (iv.lo, iv.hi):
            if f in pool and f not in analyzed and f not in picked:
                picked[f] = iv.span
                if len(picked) == batch_size:
                    return CandidateBatch(tuple(sorted(picked)), picked)
    if not picked:
        raise EmptyCandidates("no unanalyzed frames left in the pool")
    return CandidateBatch(tuple(sorted(picked)), picked)


def apply_verdicts(
    batch: Sequence[int],
    verdicts: Sequence[RelevanceVerdict],
    signal: SimilaritySignal,
    cfg: SelectionConfig,
) -> list[int]:
    """Positive frames, topped up to ``floor(B / I_max)`` from neutral then negative frames.

    Within a tier, frames are taken by descending similarity, ties to the
    earlier frame.
    """
    if len(verdicts) != len(batch):
        raise ValueError(f"{len(verdicts)} verdicts for {len(batch)} frames")
    theta = cfg.positive_threshold
    rating = {f: v.rating for f, v in zip(batch, verdicts)}
    validated = [f for f in batch if rating[f] > theta]
    short = cfg.fallback_quota - len(validated)
    if short > 0:
        neutral = top_by_score([f for f in batch if rating[f] == theta], signal, len(batch))
        negative = top_by_score([f for f in batch if rating[f] < theta], signal, len(batch))
        validated += (neutral + negative)[:short]
    return sorted(validated)


def lds_depth(remaining: int, validated_count: int, depth_cap: int) -> int:
    if validated_count <= 0:
        return 1
    return max(1, min(math.ceil(remaining / validated_count), depth_cap))


def lds_expand(
    anchor: int,
    interval_len: int,
    remaining: int,
    validated_count: int,
    cfg: LdsConfig,
    total_frames: int,
) -> list[int]:
    """Frames at ``anchor +/- alpha * beta**(m-1)`` for ``m = 1..D``, clipped to ``[1, N]``.

    ``alpha = max(alpha_frac * interval_len, alpha_min)``; the depth ``D``
    shares the remaining budget across validated anchors, capped at
    ``depth_cap``.
    """
    depth = lds_depth(remaining, validated_count, cfg.depth_cap)
    alpha = max(cfg.alpha_frac * interval_len, cfg.alpha_min)
    out: set[int] = set()
    for m in range(1, depth + 1):
        # stride is rounded before offsetting so both sides stay symmetric
        step = round_half_away(alpha * cfg.beta ** (m - 1))
        for f in (anchor - step, anchor + step):
            if 1 <= f <= total_frames and f != anchor:
                out.add(f)
    return sorted(out)


def run_selection(
    signal: SimilaritySignal,
    meta: VideoMeta,
    cfg: SelectionConfig,
    initial: InitialFrameSet,
    similarity: SimilarityScorer,
    analyzer: RelevanceAnalyzer,
    query: str = "",
    video_ref: str = "",
) -> SelectionResult:
    """Run the ranking / analysis / early-stop / densify loop for at most ``I_max`` iterations.

    ``signal`` is updated in place with the scores of newly discovered frames.
    """
    if not initial.frames:
        raise ValueError("initial frame set is empty")
    n = meta.total_frames
    state = SelectionState(pool=set(initial.frames))
    verdicts: dict[int, RelevanceVerdict] = {}
    early_stopped = False
    scored_frames = 0

    while state.iteration < cfg.max_iterations:
        ranked = rank_intervals(partition_intervals(sorted(state.pool), n), signal, cfg.length_coef)
        try:
            batch = pick_candidates(ranked, state.pool, state.analyzed, cfg.candidate_batch)
        except EmptyCandidates:
            log.debug("pool exhausted after %d iterations", state.iteration)
            break
        state.iteration += 1
        try:
            batch_verdicts = analyzer.analyze(query, list(batch.frames), video_ref)
        except ScorerTransportError as exc:
            raise exc.with_iteration(state.iteration) from exc
        if len(batch_verdicts) != len(batch.frames):
            raise ValueError("analyzer returned a misaligned verdict list")
        state.analyzed.update(batch.frames)
        verdicts.update(zip(batch.frames, batch_verdicts))

        state.validated = set(apply_verdicts(batch.frames, batch_verdicts, signal, cfg))
        state.final |= state.validated
        if len(state.final) >= cfg.budget:
            state.final = set(top_by_score(state.final, signal, cfg.budget))
            early_stopped = True
            break

        remaining = cfg.budget - len(state.final)
        discovered: set[int] = set()
        for anchor in sorted(state.validated):
            discovered.update(
                lds_expand(anchor, batch.source_span[anchor], remaining, len(state.validated), cfg.lds, n)
            )
        to_score = sorted(f for f in discovered if f not in signal)
        if to_score:
            try:
                scores = similarity.score(query, to_score, video_ref)
            except ScorerTransportError as exc:
                raise exc.with_iteration(state.iteration) from exc
            signal.update(dict(zip(to_score, scores)))
            scored_frames += len(to_score)
        state.pool |= discovered

    stats = WorkloadStats(
        analyzed_count=len(state.analyzed),
        w_best=cfg.candidate_batch,
        w_worst=cfg.candidate_batch * cfg.max_iterations,
        iterations_run=state.iteration,
        early_stopped=early_stopped,
        similarity_frames_scored=scored_frames,
    )
    return SelectionResult(tuple(sorted(state.final)), stats, verdicts)
