"""Replay scorers backed by a line-delimited JSON record file.

Each line is ``{"video_id": str, "frame": int, "kind": "sim"|"rel", "value": ...}``
where ``sim`` values are floats and ``rel`` values are raw analyzer text.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterable, Sequence

from .base import MissingReplayEntry, RelevanceVerdict, require_frames
from .prompts import parse_verdict


class ReplayStore:
    def __init__(self, sim: dict[tuple[str, int], float], rel: dict[tuple[str, int], str]) -> None:
        self.sim = sim
        self.rel = rel

    @classmethod
    def load(cls, path: str | Path) -> "ReplayStore":
        sim: dict[tuple[str, int], float] = {}
        rel: dict[tuple[str, int], str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    key = (str(rec["video_id"]), int(rec["frame"]))
                    kind = rec["kind"]
                    if kind == "sim":
                        sim[key] = float(rec["value"])
                    elif kind == "rel":
                        rel[key] = str(rec["value"])
                    else:
                        raise ValueError(f"unknown kind {kind!r}")
                except (ValueError, KeyError, TypeError) as exc:
                    raise ValueError(f"{path}:{lineno}: bad replay record: {exc}") from exc
        return cls(sim, rel)


def write_replay(path: str | Path, records: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            count += 1
    return count


def video_id_of(video_ref: str) -> str:
    return Path(video_ref).name or str(video_ref)


class ReplaySimilarity:
    def __init__(self, store: ReplayStore) -> None:
        self.store = store
        self.calls = 0
        self._lock = threading.Lock()

    def score(self, query: str, frames: Sequence[int], video_ref: str) -> list[float]:
        require_frames(frames)
        with self._lock:
            self.calls += 1
        vid = video_id_of(video_ref)
        out = []
        for f in frames:
            try:
                out.append(self.store.sim[(vid, int(f))])
            except KeyError:
                raise MissingReplayEntry(vid, int(f), "sim") from None
        return out


class ReplayAnalyzer:
    def __init__(self, store: ReplayStore, positive_threshold: int = 3) -> None:
        self.store = store
        self.positive_threshold = positive_threshold
        self.calls = 0
        self._lock = threading.Lock()

    def analyze(self, query: str, frames: Sequence[int], video_ref: str) -> list[RelevanceVerdict]:
        if not frames:
            return []
        with self._lock:
            self.calls += 1
        vid = video_id_of(video_ref)
        out = []
        for f in frames:
            try:
                raw = self.store.rel[(vid, int(f))]
            except KeyError:
                raise MissingReplayEntry(vid, int(f), "rel") from None
            out.append(parse_verdict(raw, int(f), self.positive_threshold))
        return out
