import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from airsel.events import InitialFrameSet
from airsel.scorers import RelevanceVerdict
from airsel.selection import (
    CandidateBatch,
    EmptyCandidates,
    Interval,
    LdsConfig,
    SelectionConfig,
    apply_verdicts,
    interval_potential,
    lds_depth,
    lds_expand,
    partition_intervals,
    pick_candidates,
    rank_intervals,
    run_selection,
)
from airsel.signal import SimilaritySignal, VideoMeta

from .oracles import candidates_oracle, potential_oracle


class ScriptedAnalyzer:
    def __init__(self, rate):
        self.rate = rate
        self.seen = []

    def analyze(self, query, frames, video_ref):
        self.seen.extend(frames)
        return [RelevanceVerdict(f, self.rate(f)) for f in frames]


class LinearSimilarity:
    def __init__(self):
        self.frames = []

    def score(self, query, frames, video_ref):
        self.frames.extend(frames)
        return [1.0 - f / 1e6 for f in frames]


def _verdicts(frames, ratings):
    return [RelevanceVerdict(f, r) for f, r in zip(frames, ratings)]


def test_partition_examples():
    assert partition_intervals([100, 500], 1000) == [Interval(1, 100), Interval(100, 500), Interval(500, 1000)]
    assert partition_intervals([1, 1000], 1000) == [Interval(1, 1), Interval(1, 1000), Interval(1000, 1000)]
    assert partition_intervals([42], 1000) == [Interval(1, 42), Interval(42, 1000)]


def test_potential_examples():
    s = SimilaritySignal(100, {10: 0.5, 15: 0.7, 20: 0.6})
    assert interval_potential(Interval(10, 20), s) == pytest.approx(1.236)
    assert interval_potential(Interval(30, 60), s) == 0.0
    flat = SimilaritySignal(100, {10: 0.4, 60: 0.4})
    assert interval_potential(Interval(10, 60), flat) == pytest.approx(0.4 * (1 + math.log10(50)))


def test_pick_candidates_collapses_shared_endpoints():
    s = SimilaritySignal(1000, {100: 0.9, 200: 0.8, 300: 0.7})
    ranked = rank_intervals(partition_intervals([100, 200, 300], 1000), s, 1.0)
    batch = pick_candidates(ranked, {100, 200, 300}, set(), 4)
    assert batch.frames == (100, 200, 300)
    with pytest.raises(EmptyCandidates):
        pick_candidates(ranked, {100, 200, 300}, {100, 200, 300}, 4)
    pool = {100, 200, 300, 400, 500}
    s.update({400: 0.6, 500: 0.5})
    ranked = rank_intervals(partition_intervals(sorted(pool), 1000), s, 1.0)
    assert len(pick_candidates(ranked, pool, set(), 4).frames) == 4


def test_apply_verdicts_examples():
    cfg = SelectionConfig(budget=32)
    frames = (10, 20, 30, 40, 50)
    s = SimilaritySignal(100, {f: f / 100 for f in frames})
    assert apply_verdicts(frames, _verdicts(frames, [5, 4, 3, 2, 1]), s, cfg)[:2] == [10, 20]
    # quota already met by positives: nothing topped up
    assert apply_verdicts(frames, _verdicts(frames, [5, 4, 3, 2, 1]), s, SelectionConfig(budget=12)) == [10, 20]
    frames12 = tuple(range(10, 130, 10))
    s12 = SimilaritySignal(200, {f: f / 200 for f in frames12})
    assert apply_verdicts(frames12, _verdicts(frames12, [1] * 12), s12, cfg) == [80, 90, 100, 110, 120]
    # one positive, then neutrals before negatives, each tier by similarity
    ratings = [5, 3, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1]
    got = apply_verdicts(frames12, _verdicts(frames12, ratings), s12, cfg)
    assert got == [10, 20, 30, 110, 120]


def test_lds_examples():
    cfg = LdsConfig()
    assert lds_expand(100, 0, 6, 2, cfg, 1000) == [66, 77, 85, 115, 123, 134]
    assert lds_expand(5, 0, 1, 1, cfg, 1000) == [20]
    assert lds_expand(500, 0, 1, 5, cfg, 1000) == [485, 515]
    # alpha grows with the source interval once 5% exceeds the floor
    assert lds_expand(500, 1000, 1, 1, cfg, 10_000) == [450, 550]


def test_lds_depth():
    assert lds_depth(6, 2, 4) == 3
    assert lds_depth(100, 1, 4) == 4
    assert lds_depth(0, 3, 4) == 1


def _grid_signal(total, step=24, fn=lambda f: 0.5):
    return SimilaritySignal(total, {f: fn(f) for f in range(1, total + 1, step)})


def test_perfect_oracle_stops_after_first_batch():
    s = _grid_signal(4800)
    initial = InitialFrameSet(tuple(range(1, 4800, 192)), (24,))
    analyzer = ScriptedAnalyzer(lambda f: 5)
    res = run_selection(s, VideoMeta(4800), SelectionConfig(budget=8), initial, LinearSimilarity(), analyzer)
    assert res.stats.early_stopped and res.stats.iterations_run == 1
    assert res.stats.analyzed_count == 12
    assert len(res.frames) == 8


def test_all_negative_runs_every_iteration():
    s = _grid_signal(43200, fn=lambda f: (f * 7919 % 1000) / 1000)
    initial = InitialFrameSet(tuple(range(1, 43200, 672)), (64,))
    analyzer = ScriptedAnalyzer(lambda f: 1)
    res = run_selection(s, VideoMeta(43200), SelectionConfig(budget=32), initial, LinearSimilarity(), analyzer)
    assert res.stats.iterations_run == 6
    assert len(res.frames) == 6 * (32 // 6) == 30
    assert 12 <= res.stats.analyzed_count <= 72
    assert len(analyzer.seen) == len(set(analyzer.seen))


def test_small_pool_exhausts_candidates():
    # three pooled frames, all rated negative; the fallback keeps the best one (16),
    # whose +/-15 ring lands on frames already pooled, so iteration 2 has nothing left
    s = SimilaritySignal(40, {1: 0.2, 16: 0.9, 31: 0.3})
    initial = InitialFrameSet((1, 16, 31), (3,))
    analyzer = ScriptedAnalyzer(lambda f: 1)
    cfg = SelectionConfig(budget=6, lds=LdsConfig(depth_cap=1))
    res = run_selection(s, VideoMeta(40), cfg, initial, LinearSimilarity(), analyzer)
    assert res.frames == (16,)
    assert res.stats.iterations_run == 1
    assert res.stats.analyzed_count == 3
    assert not res.stats.early_stopped


def test_empty_initial_rejected():
    with pytest.raises(ValueError):
        run_selection(
            _grid_signal(100), VideoMeta(100), SelectionConfig(budget=8), InitialFrameSet((), ()),
            LinearSimilarity(), ScriptedAnalyzer(lambda f: 1),
        )


def test_trim_keeps_highest_similarity():
    s = _grid_signal(4800, fn=lambda f: f / 4800)
    initial = InitialFrameSet(tuple(range(1, 4800, 192)), (24,))
    res = run_selection(
        s, VideoMeta(4800), SelectionConfig(budget=8), initial, LinearSimilarity(), ScriptedAnalyzer(lambda f: 5)
    )
    kept = set(res.frames)
    dropped = set(res.per_frame_verdicts) - kept
    assert min(s[f] for f in kept) >= max(s[f] for f in dropped)


# --- properties ---

pools = st.lists(st.integers(1, 2000), min_size=1, max_size=40, unique=True)
scores = st.dictionaries(st.integers(1, 2000), st.floats(0, 1, allow_nan=False), max_size=80)


@given(pools)
def test_partition_is_cover(pool):
    ivs = partition_intervals(pool, 2000)
    assert sum(iv.span for iv in ivs) == 2000 - 1
    assert ivs[0].lo == 1 and ivs[-1].hi == 2000
    assert all(a.hi == b.lo for a, b in zip(ivs, ivs[1:]))


@given(st.floats(0.01, 1), st.floats(0.01, 1), st.integers(2, 500))
def test_potential_monotone_in_mean(a, b, span):
    lo_mean, hi_mean = sorted((a, b))
    if hi_mean - lo_mean < 1e-9:
        return
    s1 = SimilaritySignal(1000, {1: lo_mean, 1 + span: lo_mean})
    s2 = SimilaritySignal(1000, {1: hi_mean, 1 + span: hi_mean})
    iv = Interval(1, 1 + span)
    assert interval_potential(iv, s1) < interval_potential(iv, s2)


@given(pools, scores, st.integers(1, 20), st.data())
def test_potential_and_candidates_match_oracle(pool, known, batch, data):
    s = SimilaritySignal(2000, known)
    analyzed = set(data.draw(st.lists(st.sampled_from(pool), max_size=len(pool))))
    for iv in partition_intervals(pool, 2000):
        assert interval_potential(iv, s) == pytest.approx(potential_oracle(iv.lo, iv.hi, known), rel=1e-12, abs=1e-12)
    ranked = rank_intervals(partition_intervals(pool, 2000), s, 1.0)
    expected = candidates_oracle(pool, 2000, known, analyzed, batch)
    if not expected:
        with pytest.raises(EmptyCandidates):
            pick_candidates(ranked, set(pool), analyzed, batch)
    else:
        assert list(pick_candidates(ranked, set(pool), analyzed, batch).frames) == expected


@given(st.integers(0, 10_000), st.integers(1, 10), st.integers(1, 100))
def test_run_never_reanalyzes_and_is_deterministic(seed, budget, threshold_mod):
    def rate(f):
        return 1 + (f * 2654435761 + seed) % 5

    def run():
        s = _grid_signal(9600, fn=lambda f: ((f * 40503 + seed) % 997) / 997)
        initial = InitialFrameSet(tuple(range(1, 9600, 384)), (24,))
        a = ScriptedAnalyzer(rate)
        res = run_selection(s, VideoMeta(9600), SelectionConfig(budget=budget), initial, LinearSimilarity(), a)
        return res, a

    r1, a1 = run()
    r2, _ = run()
    assert len(a1.seen) == len(set(a1.seen))
    assert r1.frames == r2.frames
    assert r1.stats.within_bounds()
    assert len(r1.frames) <= budget
