import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from airsel.harness import (
    FAMILIES,
    OracleAnalyzer,
    PlantedEvent,
    SyntheticVideoSpec,
    TRAP_BUDGET,
    answer_recall,
    make_spec,
    oracle_relevance,
    replay_records,
    run_comparison,
    run_family,
    synthetic_scores,
    uniform_frames,
)


def _spec(**kw):
    base = dict(
        total_frames=4000,
        planted_events=(PlantedEvent(1200, 240, 0.9, True),),
        noise_std=0.0,
    )
    base.update(kw)
    return SyntheticVideoSpec(**base)


def test_bump_values():
    s = synthetic_scores(_spec())
    assert s[1200 - 1] == pytest.approx(0.9)
    assert s[1200 + 120 - 1] == pytest.approx(0.9 * math.exp(-0.5))
    assert s[1200 - 120 - 1] == pytest.approx(0.9 * math.exp(-0.5))


def test_no_events_no_noise_is_zero():
    spec = SyntheticVideoSpec(500, (), 0.0, multi_answer=True)
    assert not synthetic_scores(spec).any()


def test_noise_is_seed_deterministic():
    a = synthetic_scores(_spec(noise_std=0.05, noise_seed=7))
    b = synthetic_scores(_spec(noise_std=0.05, noise_seed=7))
    c = synthetic_scores(_spec(noise_std=0.05, noise_seed=8))
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_oracle_rules():
    spec = _spec(distractor_events=(PlantedEvent(3000, 100, 0.8),))
    assert oracle_relevance(1200, spec) == 5
    assert oracle_relevance(1200 + 100, spec) == 4
    assert oracle_relevance(3000, spec) == 2
    assert oracle_relevance(1200 + 400, spec) == 3
    assert oracle_relevance(10, spec) == 1


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticVideoSpec(100, (PlantedEvent(50, 10, 0.5),))
    with pytest.raises(ValueError):
        SyntheticVideoSpec(100, (PlantedEvent(500, 10, 0.5, True),))


def test_recall_tolerance():
    spec = _spec()
    assert answer_recall([1200], spec) == pytest.approx(25 / 241)
    assert answer_recall([], spec) == 0.0
    assert answer_recall(range(1080, 1321, 20), spec) == 1.0


def test_uniform_frames_spacing():
    assert uniform_frames(200, 8) == [13, 38, 63, 88, 113, 138, 163, 188]


def test_trap_example_air_beats_topk():
    res = run_comparison(make_spec("trap", 0), budget=TRAP_BUDGET)
    assert res["topk"].recall < res["air"].recall
    assert res["uniform"].n_air == res["topk"].n_air == 0
    assert 12 <= res["air"].n_air <= 72
    assert res["air"].wall_operations["analyzer_repeats"] == 0


def test_saturated_answer_gives_full_recall():
    spec = SyntheticVideoSpec(10, (PlantedEvent(5, 10, 0.9, True),), 0.0)
    res = run_comparison(spec, budget=8)
    assert {name: m.recall for name, m in res.items()} == {"uniform": 1.0, "topk": 1.0, "air": 1.0}


def test_oracle_analyzer_counts_repeats():
    a = OracleAnalyzer(_spec())
    a.analyze("q", [1, 2], "")
    a.analyze("q", [2], "")
    assert (a.calls, a.frames_analyzed, a.repeats) == (2, 3, 1)


def test_replay_records_round_trip():
    spec = _spec(total_frames=50, planted_events=(PlantedEvent(25, 10, 0.9, True),))
    recs = replay_records(spec)
    assert len(recs) == 100
    assert {r["kind"] for r in recs} == {"sim", "rel"}


def test_run_family_report_shape():
    out = run_family("short", 3, seed=5)
    assert len(out["records"]) == 9
    summary = out["summary"]
    assert summary["runs"] == 3 and summary["bound_violations"] == 0
    assert set(summary["strategies"]) == {"uniform", "topk", "air"}


@pytest.mark.parametrize("family", FAMILIES)
def test_make_spec_deterministic(family):
    assert make_spec(family, 11) == make_spec(family, 11)
    assert make_spec(family, 11) != make_spec(family, 12)


def test_family_durations():
    assert make_spec("short", 0).total_frames < 300 * 24
    assert 300 * 24 <= make_spec("medium", 0).total_frames <= 900 * 24
    assert make_spec("long", 0).total_frames > 900 * 24
    assert make_spec("trap", 0).total_frames == 43200


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(0, 10_000))
def test_every_generated_spec_respects_workload_bound(family, seed):
    res = run_comparison(make_spec(family, seed), strategies=("air",))
    assert 12 <= res["air"].n_air <= 72
