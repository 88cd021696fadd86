"""JSON-over-HTTP adapters for remote similarity, analyzer and answerer services."""

from __future__ import annotations

import logging
import time
from typing import Any, Sequence

import requests

from ..frames import FrameDirectory
from .base import RelevanceVerdict, ScorerTransportError, require_frames
from .prompts import (
    PromptTemplates,
    extract_answer_letter,
    parse_verdict,
    render_analysis_prompt,
    render_answering_prompt,
)

log = logging.getLogger(__name__)


class _HttpClient:
    def __init__(
        self,
        endpoint: str,
        path: str,
        retries: int = 3,
        backoff_s: float = 0.5,
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
    ) -> None:
        self.url = endpoint.rstrip("/") + path
        self.retries = retries
        self.backoff_s = backoff_s
        self.timeout_s = timeout_s
        self.session = session or requests.Session()
        self.requests_sent = 0

    def post(self, payload: dict[str, Any], frames: Sequence[int]) -> dict[str, Any]:
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            self.requests_sent += 1
            try:
                resp = self.session.post(self.url, json=payload, timeout=self.timeout_s)
                if resp.status_code >= 500:
                    raise requests.HTTPError(f"server error {resp.status_code}", response=resp)
                resp.raise_for_status()
                return resp.json()
            except (requests.ConnectionError, requests.Timeout, requests.HTTPError, ValueError) as exc:
                status = getattr(getattr(exc, "response", None), "status_code", None)
                if status is not None and 400 <= status < 500:
                    raise ScorerTransportError(f"{self.url} rejected request: {exc}", frames) from exc
                log.warning("POST %s failed (attempt %d/%d): %s", self.url, attempt + 1, self.retries + 1, exc)
                last = exc
        raise ScorerTransportError(f"{self.url} unreachable after {self.retries + 1} attempts: {last}", frames) from last


def _frame_payload(frames: Sequence[int], video_ref: str) -> list[dict[str, Any]]:
    fd = FrameDirectory(video_ref)
    return [{"index": int(f), "image_b64": fd.image_b64(int(f))} for f in frames]


class RemoteSimilarity:
    """``POST /v1/similarity`` -> ``{"scores": [...]}`` aligned to the request."""

    def __init__(self, endpoint: str, model_id: str = "", **http: Any) -> None:
        self.model_id = model_id
        self.client = _HttpClient(endpoint, "/v1/similarity", **http)

    def score(self, query: str, frames: Sequence[int], video_ref: str) -> list[float]:
        require_frames(frames)
        payload = {
            "query": query,
            "video_id": FrameDirectory(video_ref).video_id,
            "frames": _frame_payload(frames, video_ref),
            "model_id": self.model_id,
        }
        body = self.client.post(payload, frames)
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(frames):
            raise ScorerTransportError("similarity response misaligned with request", frames)
        return [float(s) for s in scores]


class RemoteAnalyzer:
    """``POST /v1/analyze``; one batch request, or one request per frame when ``batch`` is false."""

    def __init__(
        self,
        endpoint: str,
        templates: PromptTemplates | None = None,
        positive_threshold: int = 3,
        batch: bool = True,
        **http: Any,
    ) -> None:
        self.templates = templates or PromptTemplates()
        self.positive_threshold = positive_threshold
        self.batch = batch
        self.client = _HttpClient(endpoint, "/v1/analyze", **http)

    def _request(self, prompt: str, frames: Sequence[int], video_ref: str) -> dict[int, str]:
        body = self.client.post({"prompt": prompt, "frames": _frame_payload(frames, video_ref)}, frames)
        raw: dict[int, str] = {}
        for item in body.get("results") or []:
            try:
                idx = int(item["index"])
            except (KeyError, TypeError, ValueError):
                continue
            # first answer for a frame wins; retries never re-attribute it
            raw.setdefault(idx, str(item.get("raw_text", "")))
        return raw

    def analyze(self, query: str, frames: Sequence[int], video_ref: str) -> list[RelevanceVerdict]:
        if not frames:
            return []
        prompt = render_analysis_prompt(self.templates, query)
        if self.batch:
            raw = self._request(prompt, frames, video_ref)
        else:
            raw = {}
            for f in frames:
                raw.update(self._request(prompt, [f], video_ref))
        return [parse_verdict(raw.get(int(f), ""), int(f), self.positive_threshold) for f in frames]


class RemoteAnswerer:
    """``POST /v1/answer`` -> ``{"raw_text": ...}``; returns ``(letter or None, raw_text)``."""

    def __init__(self, endpoint: str, templates: PromptTemplates | None = None, **http: Any) -> None:
        self.templates = templates or PromptTemplates()
        self.client = _HttpClient(endpoint, "/v1/answer", **http)

    def answer(self, query: str, frames: Sequence[int], video_ref: str, n_options: int = 4) -> tuple[str | None, str]:
        prompt = render_answering_prompt(self.templates, query, n_options)
        body = self.client.post({"prompt": prompt, "frames": _frame_payload(frames, video_ref)}, frames)
        raw = str(body.get("raw_text", ""))
        return extract_answer_letter(raw), raw
