"""Frame-directory video layout: one image per stored frame, named by zero-padded 1-based index."""

from __future__ import annotations

import base64
from functools import cached_property
from pathlib import Path

IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".webp"}


class FrameDirectory:
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        if not self.path.is_dir():
            raise NotADirectoryError(f"{self.path} is not a frame directory")

    @cached_property
    def files(self) -> dict[int, Path]:
        out: dict[int, Path] = {}
        for p in self.path.iterdir():
            if p.suffix.lower() in IMAGE_SUFFIXES and p.stem.isdigit():
                out[int(p.stem)] = p
        return out

    @property
    def total_frames(self) -> int:
        return len(self.files)

    @property
    def video_id(self) -> str:
        return self.path.name

    def image_b64(self, frame: int) -> str:
        try:
            p = self.files[frame]
        except KeyError:
            raise FileNotFoundError(f"frame {frame} not found in {self.path}") from None
        return base64.b64encode(p.read_bytes()).decode("ascii")
