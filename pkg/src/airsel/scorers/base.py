from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable


@dataclass(frozen=True)
class RelevanceVerdict:
    frame: int
    rating: int
    reasoning: str = ""
    parse_ok: bool = True

    def __post_init__(self) -> None:
        if not 1 <= self.rating <= 5:
            raise ValueError(f"rating must be in [1, 5], got {self.rating}")

    def to_dict(self) -> dict:
        return {"rating": self.rating, "reasoning": self.reasoning, "parse_ok": self.parse_ok}


class ScorerError(RuntimeError):
    pass


class ScorerTransportError(ScorerError):
    """A remote scorer could not be reached after retries."""

    def __init__(self, message: str, frames: Sequence[int], iteration: int | None = None) -> None:
        self.message = message
        self.frames = list(frames)
        self.iteration = iteration
        where = f" (iteration {iteration})" if iteration is not None else ""
        super().__init__(f"{message}{where}; frames={self.frames}")

    def with_iteration(self, iteration: int) -> "ScorerTransportError":
        return ScorerTransportError(self.message, self.frames, iteration)


class MissingReplayEntry(ScorerError, KeyError):
    def __init__(self, video_id: str, frame: int, kind: str) -> None:
        super().__init__(f"no {kind!r} replay entry for video {video_id!r} frame {frame}")
        self.video_id = video_id
        self.frame = frame
        self.kind = kind

    def __str__(self) -> str:
        return str(self.args[0])


@runtime_checkable
class SimilarityScorer(Protocol):
    def score(self, query: str, frames: Sequence[int], video_ref: str) -> list[float]: ...


@runtime_checkable
class RelevanceAnalyzer(Protocol):
    def analyze(self, query: str, frames: Sequence[int], video_ref: str) -> list[RelevanceVerdict]: ...


SCORER_KINDS = ("synthetic", "replay", "remote")


@dataclass(frozen=True)
class ScorerDescriptor:
    kind: str
    model_id: str = ""
    endpoint: str | None = None
    replay_path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in SCORER_KINDS:
            raise ValueError(f"unknown scorer kind {self.kind!r}; expected one of {SCORER_KINDS}")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote scorer needs an endpoint")
        if self.kind == "replay" and not self.replay_path:
            raise ValueError("replay scorer needs a replay_path")
        if self.kind != "remote" and self.endpoint:
            raise ValueError(f"endpoint is only valid for remote scorers, not {self.kind!r}")
        if self.kind != "replay" and self.replay_path:
            raise ValueError(f"replay_path is only valid for replay scorers, not {self.kind!r}")


def require_frames(frames: Sequence[int]) -> None:
    if len(frames) == 0:
        raise ValueError("at least one frame is required")
