"""Line-delimited JSON question-answering records."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .scorers.prompts import format_query

log = logging.getLogger(__name__)

LETTERS = "ABCDE"


class EmptyDataset(ValueError):
    pass


@dataclass(frozen=True)
class DatasetRecord:
    video_id: str
    video_ref: str
    query: str
    options: tuple[str, ...] = ()
    answer: str | None = None
    num_frames: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.query.strip():
            raise ValueError("query must be non-empty")
        if self.options and not 2 <= len(self.options) <= 5:
            raise ValueError(f"expected 2-5 options, got {len(self.options)}")
        if self.answer is not None:
            valid = LETTERS[: len(self.options)] if self.options else LETTERS
            if self.answer not in valid:
                raise ValueError(f"answer {self.answer!r} is not one of {valid}")
        if self.num_frames is not None and self.num_frames < 1:
            raise ValueError("num_frames must be >= 1")

    @property
    def prompt_query(self) -> str:
        return format_query(self.query, self.options) if self.options else self.query

    @classmethod
    def from_json(cls, rec: dict) -> "DatasetRecord":
        if not isinstance(rec, dict):
            raise TypeError("record must be a JSON object")
        ref = str(rec["video_ref"])
        answer = rec.get("answer")
        return cls(
            video_id=str(rec.get("video_id") or Path(ref).name),
            video_ref=ref,
            query=str(rec["query"]),
            options=tuple(str(o) for o in rec.get("options") or ()),
            answer=None if answer is None else str(answer).strip().upper(),
            num_frames=None if rec.get("num_frames") is None else int(rec["num_frames"]),
        )


def load_dataset(path: str | Path) -> list[DatasetRecord]:
    """Parse every valid line; malformed lines are logged with their line number and skipped."""
    records: list[DatasetRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(DatasetRecord.from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                log.warning("%s:%d: skipping malformed record: %s", path, lineno, exc)
    if not records:
        raise EmptyDataset(f"{path}: no valid records")
    return records
