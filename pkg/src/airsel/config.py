"""Flat pipeline configuration: every hyperparameter plus scorer descriptors."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .events import EventSamplingParams
from .scorers.base import ScorerDescriptor
from .selection import LdsConfig, SelectionConfig
from .signal import BudgetConfig
from .thresholding import ThresholdParams

ENDPOINT_ENV = {
    "similarity_endpoint": "AIR_SIM_ENDPOINT",
    "analyzer_endpoint": "AIR_ANALYZE_ENDPOINT",
    "answerer_endpoint": "AIR_ANSWER_ENDPOINT",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    # sampling budget
    storage_rate: float = 24.0
    sample_fps: float = 1.0
    v_max: int = 32
    v_min: int = 8
    short_video_s: float = 300.0
    budget: int | None = None  # fixed B, bypassing the duration rule
    # adaptive threshold
    gamma: float = 0.7
    em_max_iterations: int = 200
    em_ll_tolerance: float = 1e-6
    variance_floor: float = 1e-6
    # event-wise sampling; None derives 2 s / 3 s / 2*max(B, C)
    min_gap: int | None = None
    min_length: int | None = None
    initial_set_size: int | None = None
    # iterative selection
    candidate_batch: int = 12
    max_iterations: int = 6
    positive_threshold: int = 3
    length_coef: float = 1.0
    alpha_frac: float = 0.05
    alpha_min: float = 15.0
    beta: float = 1.5
    depth_cap: int = 4
    # scorers
    similarity_kind: str = "replay"
    similarity_model_id: str = ""
    similarity_endpoint: str | None = None
    similarity_replay_path: str | None = None
    analyzer_kind: str = "replay"
    analyzer_model_id: str = ""
    analyzer_endpoint: str | None = None
    analyzer_replay_path: str | None = None
    analyzer_batch: bool = True
    answerer_endpoint: str | None = None
    retries: int = 3
    backoff_s: float = 0.5
    timeout_s: float = 60.0

    def __post_init__(self) -> None:
        # construct every sub-config once so invalid values fail at load time
        try:
            self.budget_config()
            self.threshold_params()
            self.event_params(self.v_max)
            self.selection_config(self.v_max)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.budget is not None and self.budget < 1:
            raise ConfigError("budget must be >= 1")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path | None, env: dict[str, str] | None = None) -> "PipelineConfig":
        data: dict[str, Any] = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: expected a JSON object")
        env = os.environ if env is None else env
        for key, var in ENDPOINT_ENV.items():
            if env.get(var):
                data[key] = env[var]
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def replace(self, **changes: Any) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    def budget_config(self) -> BudgetConfig:
        return BudgetConfig(self.v_max, self.v_min, self.sample_fps, self.short_video_s)

    def threshold_params(self) -> ThresholdParams:
        return ThresholdParams(self.gamma, self.em_max_iterations, self.em_ll_tolerance, self.variance_floor)

    def event_params(self, budget: int) -> EventSamplingParams:
        return EventSamplingParams(
            min_gap=self.min_gap if self.min_gap is not None else round(2 * self.storage_rate),
            min_length=self.min_length if self.min_length is not None else round(3 * self.storage_rate),
            initial_set_size=(
                self.initial_set_size
                if self.initial_set_size is not None
                else 2 * max(budget, self.candidate_batch)
            ),
        )

    def selection_config(self, budget: int) -> SelectionConfig:
        return SelectionConfig(
            budget=budget,
            candidate_batch=self.candidate_batch,
            max_iterations=self.max_iterations,
            positive_threshold=self.positive_threshold,
            length_coef=self.length_coef,
            lds=LdsConfig(self.alpha_frac, self.alpha_min, self.beta, self.depth_cap),
        )

    def similarity_descriptor(self) -> ScorerDescriptor:
        return self._descriptor("similarity")

    def analyzer_descriptor(self) -> ScorerDescriptor:
        return self._descriptor("analyzer")

    def _descriptor(self, role: str) -> ScorerDescriptor:
        kind = getattr(self, f"{role}_kind")
        try:
            return ScorerDescriptor(
                kind=kind,
                model_id=getattr(self, f"{role}_model_id"),
                endpoint=getattr(self, f"{role}_endpoint") if kind == "remote" else None,
                replay_path=getattr(self, f"{role}_replay_path") if kind == "replay" else None,
            )
        except ValueError as exc:
            raise ConfigError(f"{role} scorer: {exc}") from exc
