"""Sparse query-frame similarity signal, sampling budget and window statistics."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Mapping


class FrameIndexError(IndexError):
    """A frame index fell outside ``[1, N]``."""

    def __init__(self, index: int, total_frames: int) -> None:
        super().__init__(f"frame index {index} outside [1, {total_frames}]")
        self.index = index
        self.total_frames = total_frames


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


@dataclass(frozen=True)
class VideoMeta:
    total_frames: int
    storage_rate: float = 24.0

    def __post_init__(self) -> None:
        if self.total_frames < 1:
            raise ValueError(f"total_frames must be >= 1, got {self.total_frames}")
        if self.storage_rate <= 0:
            raise ValueError(f"storage_rate must be > 0, got {self.storage_rate}")

    @property
    def duration_s(self) -> float:
        return self.total_frames / self.storage_rate


@dataclass(frozen=True)
class BudgetConfig:
    v_max: int = 32
    v_min: int = 8
    sample_fps: float = 1.0
    short_video_s: float = 300.0

    def __post_init__(self) -> None:
        if not 1 <= self.v_min <= self.v_max:
            raise ValueError(f"need 1 <= v_min <= v_max, got v_min={self.v_min}, v_max={self.v_max}")
        if self.sample_fps <= 0:
            raise ValueError(f"sample_fps must be > 0, got {self.sample_fps}")
        if self.short_video_s <= 0:
            raise ValueError(f"short_video_s must be > 0, got {self.short_video_s}")


def initial_sample_count(meta: VideoMeta, cfg: BudgetConfig) -> int:
    return max(1, round_half_away(cfg.sample_fps * meta.total_frames / meta.storage_rate))


def compute_budget(meta: VideoMeta, cfg: BudgetConfig) -> tuple[int, int]:
    """Return ``(B, n)``: the frame budget and the number of initially sampled frames.

    The budget grows linearly with the sampled duration and is clamped to
    ``[v_min, v_max]``.
    """
    n = initial_sample_count(meta, cfg)
    budget = max(min(math.floor(cfg.v_max * n / cfg.short_video_s), cfg.v_max), cfg.v_min)
    return budget, n


def initial_sample_frames(meta: VideoMeta, cfg: BudgetConfig) -> list[int]:
    """Evenly strided 1-based frame indices at ``sample_fps`` (``n`` frames, deduplicated)."""
    n = initial_sample_count(meta, cfg)
    stride = meta.storage_rate / cfg.sample_fps
    frames = sorted({min(meta.total_frames, 1 + math.floor(i * stride)) for i in range(n)})
    return frames


class SimilaritySignal:
    """Query-frame similarity over ``N`` frames where only scored frames carry a value.

    Unknown frames are simply absent. Sorted views used by the window
    statistics are rebuilt lazily after each mutation.
    """

    def __init__(self, total_frames: int, entries: Mapping[int, float] | None = None) -> None:
        if total_frames < 1:
            raise ValueError(f"total_frames must be >= 1, got {total_frames}")
        self.total_frames = total_frames
        self._entries: dict[int, float] = {}
        self._sorted: tuple[list[int], list[float]] | None = None
        if entries:
            self.update(entries)

    def __len__(self) -> int:
        return self.total_frames

    def __contains__(self, frame: object) -> bool:
        return frame in self._entries

    def __repr__(self) -> str:
        return f"SimilaritySignal(N={self.total_frames}, known={self.known_count})"

    @property
    def known_count(self) -> int:
        return len(self._entries)

    def get(self, frame: int, default: float | None = None) -> float | None:
        return self._entries.get(frame, default)

    def __getitem__(self, frame: int) -> float:
        return self._entries[frame]

    def known_indices(self) -> list[int]:
        return list(self._views()[0])

    def items(self) -> list[tuple[int, float]]:
        idx, vals = self._views()
        return list(zip(idx, vals))

    def update(self, new: Mapping[int, float]) -> "SimilaritySignal":
        for frame in new:
            if not 1 <= frame <= self.total_frames:
                raise FrameIndexError(frame, self.total_frames)
        for frame, score in new.items():
            score = float(score)
            if math.isnan(score):
                raise ValueError(f"score for frame {frame} is NaN; leave unknown frames out instead")
            self._entries[int(frame)] = score
        self._sorted = None
        return self

    def copy(self) -> "SimilaritySignal":
        return SimilaritySignal(self.total_frames, self._entries)

    def _views(self) -> tuple[list[int], list[float]]:
        if self._sorted is None:
            idx = sorted(self._entries)
            self._sorted = (idx, [self._entries[i] for i in idx])
        return self._sorted

    def window(self, lo: int, hi: int) -> tuple[list[int], list[float]]:
        """Known indices and scores inside ``[lo, hi]``, ascending."""
        idx, vals = self._views()
        a = bisect.bisect_left(idx, lo)
        b = bisect.bisect_right(idx, hi)
        return idx[a:b], vals[a:b]


def update_scores(signal: SimilaritySignal, new: Mapping[int, float]) -> SimilaritySignal:
    return signal.update(new)


@dataclass(frozen=True)
class WindowStats:
    mean: float
    total_variation: float
    known_count: int


def window_stats(signal: SimilaritySignal, lo: int, hi: int) -> WindowStats:
    """Mean and total variation of the known scores inside ``[lo, hi]``.

    Total variation sums ``|S[k+1] - S[k]|`` over consecutive known entries.
    An empty window reports zeros.
    """
    if lo > hi:
        raise ValueError(f"window lo={lo} > hi={hi}")
    _, vals = signal.window(lo, hi)
    if not vals:
        return WindowStats(0.0, 0.0, 0)
    mean = math.fsum(vals) / len(vals)
    tv = math.fsum(abs(b - a) for a, b in zip(vals, vals[1:]))
    return WindowStats(mean, tv, len(vals))


def top_by_score(frames: Iterable[int], signal: SimilaritySignal, k: int) -> list[int]:
    """The ``k`` frames with highest similarity (ties to the earlier frame); unknowns rank last."""
    ranked = sorted(frames, key=lambda f: (-signal.get(f, -math.inf), f))
    return ranked[:k]
