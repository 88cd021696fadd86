"""Persistent similarity-score cache.

One append-only log file per cache directory. The first line is a magic
header; every following line is a JSON record carrying the key, the score as
``float.hex`` (bit-exact round trip) and a CRC32 over both. Later records for
the same key supersede earlier ones. The in-memory index is rebuilt on open.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

log = logging.getLogger(__name__)

MAGIC = "AIRCACHE 1"
LOG_NAME = "scores.log"


class CacheFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CacheKey:
    video_id: str
    frame: int
    model_id: str
    kind: str = "sim"

    def __post_init__(self) -> None:
        if self.kind != "sim":
            raise ValueError(f"only similarity scores are cached, got kind {self.kind!r}")


def _checksum(key: CacheKey, hex_score: str) -> int:
    payload = json.dumps([key.video_id, key.frame, key.model_id, key.kind, hex_score])
    return zlib.crc32(payload.encode("utf-8"))


class ScoreCache:
    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.path = self.directory / LOG_NAME
        self._index: dict[CacheKey, float] = {}
        self._corrupt: set[CacheKey] = set()
        self._lock = threading.RLock()
        self.hits = 0
        self.misses = 0
        self.bad_lines = 0
        self._load()

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, key: CacheKey) -> bool:
        return key in self._index

    def _load(self) -> None:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != MAGIC:
                raise CacheFormatError(f"{self.path}: not a score cache (header {header!r})")
            for lineno, line in enumerate(fh, 2):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    key = CacheKey(str(rec["v"]), int(rec["f"]), str(rec["m"]), str(rec["k"]))
                except (ValueError, KeyError, TypeError):
                    self.bad_lines += 1
                    log.warning("%s:%d: unreadable cache record skipped", self.path, lineno)
                    continue
                try:
                    if rec.get("c") != _checksum(key, rec["s"]):
                        raise ValueError("checksum mismatch")
                    score = float.fromhex(rec["s"])
                except (ValueError, KeyError, TypeError):
                    self._corrupt.add(key)
                    self._index.pop(key, None)
                    continue
                self._index[key] = score
                self._corrupt.discard(key)

    def get(self, key: CacheKey) -> float | None:
        return self._index.get(key)

    def put(self, key: CacheKey, score: float) -> None:
        hex_score = float(score).hex()
        rec = {"v": key.video_id, "f": key.frame, "m": key.model_id, "k": key.kind, "s": hex_score}
        rec["c"] = _checksum(key, hex_score)
        with self._lock:
            self.directory.mkdir(parents=True, exist_ok=True)
            fresh = not self.path.exists() or self.path.stat().st_size == 0
            with open(self.path, "a", encoding="utf-8") as fh:
                if fresh:
                    fh.write(MAGIC + "\n")
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
            self._index[key] = float(score)
            self._corrupt.discard(key)

    def get_or_compute(self, key: CacheKey, compute: Callable[[], float]) -> float:
        """Cached score for ``key``; otherwise call ``compute`` once and persist the result."""
        with self._lock:
            if key in self._index:
                self.hits += 1
                return self._index[key]
            if key in self._corrupt:
                log.warning("evicting corrupt cache entry %s; recomputing", key)
            self.misses += 1
        score = float(compute())
        self.put(key, score)
        return score

    def stats(self) -> dict:
        return {
            "path": str(self.path),
            "entries": len(self._index),
            "corrupt_entries": len(self._corrupt),
            "unreadable_lines": self.bad_lines,
            "bytes": self.path.stat().st_size if self.path.exists() else 0,
        }

    def clear(self) -> None:
        with self._lock:
            if self.path.exists():
                os.remove(self.path)
            self._index.clear()
            self._corrupt.clear()


def cache_get_or_compute(cache: ScoreCache, key: CacheKey, compute: Callable[[], float]) -> float:
    return cache.get_or_compute(key, compute)


class CachedSimilarity:
    """Wraps a similarity scorer; only cache misses reach the inner scorer, in one batch."""

    def __init__(self, inner, cache: ScoreCache, model_id: str, video_id_of: Callable[[str], str]) -> None:
        self.inner = inner
        self.cache = cache
        self.model_id = model_id
        self.video_id_of = video_id_of
        self.inner_calls = 0

    def score(self, query: str, frames: Sequence[int], video_ref: str) -> list[float]:
        vid = self.video_id_of(video_ref)
        # query participates in the model id: a cached score is query-specific
        model = f"{self.model_id}|{query}"
        keys = [CacheKey(vid, int(f), model) for f in frames]
        missing = [f for f, k in zip(frames, keys) if self.cache.get(k) is None]
        fresh: dict[int, float] = {}
        if missing:
            self.inner_calls += 1
            fresh = dict(zip(missing, self.inner.score(query, missing, video_ref)))
        return [self.cache.get_or_compute(k, lambda f=f: fresh[f]) for f, k in zip(frames, keys)]
