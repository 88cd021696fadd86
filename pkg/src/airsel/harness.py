"""Synthetic videos with planted relevant segments, closed-form oracle scorers and
strategy comparison (uniform / similarity top-K / full pipeline)."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Sequence

import numpy as np

from .config import PipelineConfig
from .pipeline import select_frames
from .scorers.base import RelevanceVerdict, require_frames
from .signal import BudgetConfig, SimilaritySignal, VideoMeta, compute_budget, initial_sample_frames, top_by_score

FAMILIES = ("short", "medium", "long", "trap", "wide")
STRATEGIES = ("uniform", "topk", "air")
SYNTHETIC_QUERY = "Which moment answers the question?"

# seconds; short < 5 min, medium 5-15 min, long > 15 min
FAMILY_DURATION_S = {
    "short": (120.0, 280.0),
    "medium": (320.0, 880.0),
    "long": (960.0, 3600.0),
    "trap": (1800.0, 1800.0),
    "wide": (150.0, 230.0),
}
TRAP_BUDGET = 16


@dataclass(frozen=True)
class PlantedEvent:
    center: int
    width: int
    peak: float
    is_answer: bool = False

    def contains(self, frame: int) -> bool:
        return abs(frame - self.center) <= self.width / 2


@dataclass(frozen=True)
class SyntheticVideoSpec:
    total_frames: int
    planted_events: tuple[PlantedEvent, ...]
    noise_std: float = 0.05
    noise_seed: int = 0
    distractor_events: tuple[PlantedEvent, ...] = ()
    storage_rate: float = 24.0
    spec_id: str = "synthetic"
    multi_answer: bool = False

    def __post_init__(self) -> None:
        if self.total_frames < 1:
            raise ValueError("total_frames must be >= 1")
        answers = [e for e in self.planted_events if e.is_answer]
        if not self.multi_answer and len(answers) != 1:
            raise ValueError(f"expected exactly one answer event, got {len(answers)}")
        for ev in (*self.planted_events, *self.distractor_events):
            if not 1 <= ev.center <= self.total_frames:
                raise ValueError(f"event center {ev.center} outside [1, {self.total_frames}]")
            if ev.width <= 0 or not 0 < ev.peak <= 1:
                raise ValueError(f"bad event {ev}")
        if any(e.is_answer for e in self.distractor_events):
            raise ValueError("distractor events cannot be answers")

    @property
    def meta(self) -> VideoMeta:
        return VideoMeta(self.total_frames, self.storage_rate)

    @property
    def answers(self) -> list[PlantedEvent]:
        return [e for e in self.planted_events if e.is_answer]

    @property
    def non_answers(self) -> list[PlantedEvent]:
        return [e for e in self.planted_events if not e.is_answer] + list(self.distractor_events)


def synthetic_scores(spec: SyntheticVideoSpec) -> np.ndarray:
    """Full-rate similarity; element ``i`` is frame ``i + 1``.

    Each event adds ``peak * exp(-(f - center)**2 / (2 * (width / 2)**2))``;
    seeded Gaussian noise (numpy PCG64) is added and the sum clamped to [0, 1].
    """
    frames = np.arange(1, spec.total_frames + 1, dtype=float)
    total = np.zeros(spec.total_frames)
    for ev in (*spec.planted_events, *spec.distractor_events):
        sigma = ev.width / 2
        total += ev.peak * np.exp(-((frames - ev.center) ** 2) / (2 * sigma**2))
    if spec.noise_std > 0:
        rng = np.random.default_rng(spec.noise_seed)
        total += rng.normal(0.0, spec.noise_std, spec.total_frames)
    return np.clip(total, 0.0, 1.0)


def generate_synthetic_signal(spec: SyntheticVideoSpec, sample_fps: float = 1.0) -> SimilaritySignal:
    scores = synthetic_scores(spec)
    frames = initial_sample_frames(spec.meta, BudgetConfig(sample_fps=sample_fps))
    return SimilaritySignal(spec.total_frames, {f: float(scores[f - 1]) for f in frames})


class SyntheticSimilarity:
    def __init__(self, spec: SyntheticVideoSpec) -> None:
        self.spec = spec
        self._scores = synthetic_scores(spec)
        self.frames_scored = 0
        self.calls = 0

    def score(self, query: str, frames: Sequence[int], video_ref: str = "") -> list[float]:
        require_frames(frames)
        self.calls += 1
        self.frames_scored += len(frames)
        return [float(self._scores[int(f) - 1]) for f in frames]


def oracle_relevance(frame: int, spec: SyntheticVideoSpec) -> int:
    for ev in spec.answers:
        if abs(frame - ev.center) <= ev.width / 4:
            return 5
    for ev in spec.answers:
        if ev.contains(frame):
            return 4
    for ev in spec.non_answers:
        if ev.contains(frame):
            return 2
    for ev in spec.answers:
        if abs(frame - ev.center) <= 2 * ev.width:
            return 3
    return 1


_ORACLE_REASONS = {
    5: "It perfectly depicts the required event.",
    4: "It shows the event but some detail is missing.",
    3: "It shows context right around the event.",
    2: "It looks similar to the query but is not the event.",
    1: "There is nothing related to the query.",
}


class OracleAnalyzer:
    def __init__(self, spec: SyntheticVideoSpec) -> None:
        self.spec = spec
        self.calls = 0
        self.frames_analyzed = 0
        self.seen: set[int] = set()
        self.repeats = 0

    def analyze(self, query: str, frames: Sequence[int], video_ref: str = "") -> list[RelevanceVerdict]:
        if not frames:
            return []
        self.calls += 1
        self.frames_analyzed += len(frames)
        out = []
        for f in frames:
            if f in self.seen:
                self.repeats += 1
            self.seen.add(f)
            r = oracle_relevance(int(f), self.spec)
            out.append(RelevanceVerdict(int(f), r, _ORACLE_REASONS[r]))
        return out


def answer_frames(spec: SyntheticVideoSpec) -> np.ndarray:
    covered: set[int] = set()
    for ev in spec.answers:
        lo = max(1, math.ceil(ev.center - ev.width / 2))
        hi = min(spec.total_frames, math.floor(ev.center + ev.width / 2))
        covered.update(range(lo, hi + 1))
    return np.array(sorted(covered), dtype=np.int64)


def answer_recall(selected: Iterable[int], spec: SyntheticVideoSpec, tolerance_frames: int = 12) -> float:
    """Share of answer-event frames lying within ``tolerance_frames`` of a selected frame."""
    targets = answer_frames(spec)
    sel = np.array(sorted(set(selected)), dtype=np.int64)
    if targets.size == 0:
        return 1.0
    if sel.size == 0:
        return 0.0
    pos = np.searchsorted(sel, targets)
    left = sel[np.clip(pos - 1, 0, sel.size - 1)]
    right = sel[np.clip(pos, 0, sel.size - 1)]
    dist = np.minimum(np.abs(targets - left), np.abs(targets - right))
    return float(np.mean(dist <= tolerance_frames))


@dataclass(frozen=True)
class RunMetrics:
    recall: float
    frames_selected: int
    n_air: int
    early_stopped: bool = False
    iterations: int = 0
    budget: int = 0
    wall_operations: dict = field(default_factory=dict)
    frames: tuple[int, ...] = field(default=(), repr=False)


def uniform_frames(total_frames: int, budget: int) -> list[int]:
    return sorted({1 + math.floor((i + 0.5) * total_frames / budget) for i in range(budget)})


def run_comparison(
    spec: SyntheticVideoSpec,
    strategies: Sequence[str] = STRATEGIES,
    budget: int | None = None,
    config: PipelineConfig | None = None,
    tolerance_frames: int = 12,
) -> dict[str, RunMetrics]:
    """Run each strategy on ``spec`` with one shared frame budget and identical metrics."""
    cfg = config or PipelineConfig()
    meta = spec.meta
    if budget is None:
        budget = cfg.budget if cfg.budget is not None else compute_budget(meta, cfg.budget_config())[0]
    signal = generate_synthetic_signal(spec, cfg.sample_fps)
    out: dict[str, RunMetrics] = {}
    for name in strategies:
        if name == "uniform":
            frames = uniform_frames(spec.total_frames, budget)
            out[name] = RunMetrics(answer_recall(frames, spec, tolerance_frames), len(frames), 0, budget=budget, frames=tuple(frames))
        elif name == "topk":
            frames = sorted(top_by_score(signal.known_indices(), signal, budget))
            out[name] = RunMetrics(answer_recall(frames, spec, tolerance_frames), len(frames), 0, budget=budget, frames=tuple(frames))
        elif name == "air":
            sim = SyntheticSimilarity(spec)
            oracle = OracleAnalyzer(spec)
            run = select_frames(
                SYNTHETIC_QUERY, meta, cfg.replace(budget=budget), sim, oracle, spec.spec_id, signal.copy()
            )
            res = run.result
            out[name] = RunMetrics(
                recall=answer_recall(res.frames, spec, tolerance_frames),
                frames_selected=len(res.frames),
                n_air=res.stats.analyzed_count,
                early_stopped=res.stats.early_stopped,
                iterations=res.stats.iterations_run,
                budget=budget,
                wall_operations={
                    "similarity_calls": sim.calls,
                    "similarity_frames": sim.frames_scored + run.initial_scored,
                    "analyzer_calls": oracle.calls,
                    "analyzer_frames": oracle.frames_analyzed,
                    "analyzer_repeats": oracle.repeats,
                },
                frames=res.frames,
            )
        else:
            raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGIES}")
    return out


def _place(rng: np.random.Generator, total: int, width: int, taken: list[tuple[int, int]], gap: int) -> int:
    # rejection sampling for a center whose +/- width span keeps `gap` frames clear of others
    lo, hi = 1 + width, max(2 + width, total - width)
    center = int(rng.integers(lo, hi))
    for _ in range(200):
        if all(abs(center - c) > w + width + gap for c, w in taken):
            break
        center = int(rng.integers(lo, hi))
    taken.append((center, width))
    return center


def make_spec(family: str, seed: int, storage_rate: float = 24.0) -> SyntheticVideoSpec:
    """Deterministic synthetic video for a harness family.

    short / medium / long: one answer event plus one distractor per started
    5 minutes. trap: 30 minutes with 8-12 recurring 2 s look-alike moments
    (peak 0.8) and one 3 s answer moment (peak 0.4), so similarity alone
    ranks every look-alike above the answer. wide: a video short enough for
    a budget of at most 24 frames whose answer event spans roughly half of
    it, without distractors.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    rng = np.random.default_rng([FAMILIES.index(family), seed])
    lo_s, hi_s = FAMILY_DURATION_S[family]
    duration = float(rng.uniform(lo_s, hi_s)) if hi_s > lo_s else lo_s
    total = int(round(duration * storage_rate))
    taken: list[tuple[int, int]] = []
    gap = int(4 * storage_rate)

    if family == "wide":
        width = int(total * rng.uniform(0.4, 0.6))
        center = int(rng.integers(width // 2 + 1, total - width // 2))
        answer = PlantedEvent(center, width, float(rng.uniform(0.6, 0.8)), True)
        return SyntheticVideoSpec(total, (answer,), 0.03, seed, (), storage_rate, f"{family}-{seed}")

    if family == "trap":
        a_width = int(3 * storage_rate)
        answer = PlantedEvent(_place(rng, total, a_width, taken, gap), a_width, 0.4, True)
        distractors = []
        for _ in range(int(rng.integers(8, 13))):
            d_width = int(2 * storage_rate)
            distractors.append(PlantedEvent(_place(rng, total, d_width, taken, gap), d_width, 0.8))
        return SyntheticVideoSpec(total, (answer,), 0.05, seed, tuple(distractors), storage_rate, f"{family}-{seed}")

    a_width = int(rng.integers(5, 16) * storage_rate)
    answer = PlantedEvent(_place(rng, total, a_width, taken, gap), a_width, float(rng.uniform(0.5, 0.9)), True)
    distractors = []
    for _ in range(1 + int(duration // 300)):
        d_width = int(rng.integers(2, 11) * storage_rate)
        distractors.append(
            PlantedEvent(_place(rng, total, d_width, taken, gap), d_width, float(rng.uniform(0.3, 0.7)))
        )
    return SyntheticVideoSpec(total, (answer,), 0.05, seed, tuple(distractors), storage_rate, f"{family}-{seed}")


def run_family(
    family: str,
    runs: int,
    seed: int = 0,
    config: PipelineConfig | None = None,
    strategies: Sequence[str] = STRATEGIES,
) -> dict:
    """Run ``runs`` seeded specs of one family; returns ``{"records": [...], "summary": {...}}``."""
    cfg = config or PipelineConfig()
    records: list[dict] = []
    t0 = time.perf_counter()
    for s in range(seed, seed + runs):
        spec = make_spec(family, s, cfg.storage_rate)
        budget = TRAP_BUDGET if family == "trap" and cfg.budget is None else None
        for name, m in run_comparison(spec, strategies, budget, cfg).items():
            records.append(
                {
                    "spec_id": spec.spec_id,
                    "strategy": name,
                    "recall": m.recall,
                    "n_air": m.n_air,
                    "frames_selected": m.frames_selected,
                    "early_stopped": m.early_stopped,
                    "iterations": m.iterations,
                    "budget": m.budget,
                    "total_frames": spec.total_frames,
                }
            )
    return {"records": records, "summary": summarize(records, cfg, time.perf_counter() - t0)}


def summarize(records: Sequence[dict], config: PipelineConfig | None = None, elapsed_s: float | None = None) -> dict:
    cfg = config or PipelineConfig()
    w_best, w_worst = cfg.candidate_batch, cfg.candidate_batch * cfg.max_iterations
    by_strategy: dict[str, list[dict]] = {}
    for r in records:
        by_strategy.setdefault(r["strategy"], []).append(r)
    summary: dict = {"runs": len({r["spec_id"] for r in records}), "strategies": {}}
    for name, rows in sorted(by_strategy.items()):
        summary["strategies"][name] = {
            "mean_recall": fmean(r["recall"] for r in rows),
            "mean_n_air": fmean(r["n_air"] for r in rows),
            "mean_frames_selected": fmean(r["frames_selected"] for r in rows),
            "early_stop_rate": fmean(1.0 if r["early_stopped"] else 0.0 for r in rows),
        }
    air = by_strategy.get("air", [])
    summary["bound_violations"] = sum(1 for r in air if not w_best <= r["n_air"] <= w_worst)
    if elapsed_s is not None:
        summary["elapsed_s"] = round(elapsed_s, 3)
    return summary


def replay_records(spec: SyntheticVideoSpec, frames: Iterable[int] | None = None) -> list[dict]:
    """Replay-file records ("sim" and "rel") for every requested frame (default: all)."""
    scores = synthetic_scores(spec)
    out: list[dict] = []
    for f in frames if frames is not None else range(1, spec.total_frames + 1):
        r = oracle_relevance(f, spec)
        out.append({"video_id": spec.spec_id, "frame": f, "kind": "sim", "value": float(scores[f - 1])})
        out.append(
            {"video_id": spec.spec_id, "frame": f, "kind": "rel", "value": f"Score: {r}\nReasoning: {_ORACLE_REASONS[r]}"}
        )
    return out
