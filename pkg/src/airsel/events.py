"""Event extraction from the thresholded signal and event-wise initial sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .signal import SimilaritySignal, top_by_score


class InsufficientBudget(ValueError):
    """Fewer frames than events, so every event cannot receive one."""


@dataclass(frozen=True, order=True)
class Event:
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"event start {self.start} > end {self.end}")

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class EventSamplingParams:
    min_gap: int = 48
    min_length: int = 72
    initial_set_size: int = 24

    def __post_init__(self) -> None:
        if self.min_gap < 0 or self.min_length < 0:
            raise ValueError("min_gap and min_length must be >= 0")
        if self.initial_set_size < 1:
            raise ValueError("initial_set_size must be >= 1")


@dataclass(frozen=True)
class InitialFrameSet:
    frames: tuple[int, ...]
    per_event_budgets: tuple[int, ...]
    events: tuple[Event, ...] = ()
    # frames added outside any event to reach the requested set size
    filler: tuple[int, ...] = field(default=())


def extract_events(signal: SimilaritySignal, threshold: float) -> list[Event]:
    """Maximal runs of consecutive known frames scoring at least ``threshold``."""
    events: list[Event] = []
    run_start: int | None = None
    prev: int | None = None
    for frame, score in signal.items():
        if score >= threshold:
            if run_start is None:
                run_start = frame
        elif run_start is not None:
            events.append(Event(run_start, prev))  # type: ignore[arg-type]
            run_start = None
        prev = frame
    if run_start is not None:
        events.append(Event(run_start, prev))  # type: ignore[arg-type]
    return events


def refine_events(events: Sequence[Event], params: EventSamplingParams) -> list[Event]:
    """Merge events at most ``min_gap`` apart, then drop events no longer than ``min_length``."""
    merged: list[Event] = []
    for ev in sorted(events):
        if merged and ev.start - merged[-1].end <= params.min_gap:
            merged[-1] = Event(merged[-1].start, max(merged[-1].end, ev.end))
        else:
            merged.append(ev)
    return [ev for ev in merged if ev.duration > params.min_length]


def allocate_event_budgets(events: Sequence[Event], total: int) -> list[int]:
    """Floor-and-add-one proportional allocation, normalised to sum exactly to ``total``.

    Excess is removed in passes: each pass visits events by ascending
    fractional share (ties: larger count first, then later start) and takes
    one frame from each event that still holds more than one.
    """
    if not events:
        raise ValueError("allocate_event_budgets needs at least one event")
    if total < len(events):
        raise InsufficientBudget(f"{total} frames cannot cover {len(events)} events")
    durations = [ev.duration for ev in events]
    span = sum(durations)
    if span > 0:
        shares = [total * d / span for d in durations]
    else:
        shares = [total / len(events)] * len(events)
    counts = [math.floor(s) + 1 for s in shares]
    fracs = [s - math.floor(s) for s in shares]

    while sum(counts) > total:
        order = sorted(range(len(events)), key=lambda j: (fracs[j], -counts[j], -events[j].start))
        for j in order:
            if sum(counts) <= total:
                break
            if counts[j] > 1:
                counts[j] -= 1
    while sum(counts) < total:
        order = sorted(range(len(events)), key=lambda j: (-fracs[j], events[j].start))
        for j in order:
            if sum(counts) >= total:
                break
            counts[j] += 1
    return counts


def sample_event_peaks(
    events: Sequence[Event], budgets: Sequence[int], signal: SimilaritySignal
) -> InitialFrameSet:
    if len(events) != len(budgets):
        raise ValueError("one budget per event required")
    chosen: set[int] = set()
    for ev, k in zip(events, budgets):
        idx, _ = signal.window(ev.start, ev.end)
        chosen.update(top_by_score(idx, signal, k))
    return InitialFrameSet(tuple(sorted(chosen)), tuple(budgets), tuple(events))


def fill_initial_set(initial: InitialFrameSet, signal: SimilaritySignal, size: int) -> InitialFrameSet:
    """Top up with evenly spaced known frames until the set holds ``size`` frames."""
    missing = size - len(initial.frames)
    have = set(initial.frames)
    spare = [f for f in signal.known_indices() if f not in have]
    if missing <= 0 or not spare:
        return initial
    missing = min(missing, len(spare))
    picks = [spare[min(len(spare) - 1, math.floor((i + 0.5) * len(spare) / missing))] for i in range(missing)]
    filler = tuple(sorted(set(picks)))
    return InitialFrameSet(
        tuple(sorted(have | set(filler))), initial.per_event_budgets, initial.events, filler
    )


def initial_frame_set(
    signal: SimilaritySignal, threshold: float, params: EventSamplingParams
) -> InitialFrameSet:
    """Threshold, refine, allocate and sample; always returns ``initial_set_size`` frames when possible.

    When refinement leaves no event, the span of all known frames is used as
    a single event. When there are more events than frames to spend, the
    longest events are kept (ties: earlier start).
    """
    known = signal.known_indices()
    if not known:
        raise ValueError("signal has no known entries")
    events = refine_events(extract_events(signal, threshold), params)
    if not events:
        events = [Event(known[0], known[-1])]
    if len(events) > params.initial_set_size:
        keep = sorted(events, key=lambda e: (-e.duration, e.start))[: params.initial_set_size]
        events = sorted(keep)
    budgets = allocate_event_budgets(events, params.initial_set_size)
    initial = sample_event_peaks(events, budgets, signal)
    return fill_initial_set(initial, signal, params.initial_set_size)
