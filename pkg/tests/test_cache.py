import json
import logging
import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from airsel.cache import MAGIC, CacheFormatError, CachedSimilarity, CacheKey, ScoreCache, cache_get_or_compute


class Counter:
    def __init__(self, value=0.5):
        self.calls = 0
        self.value = value

    def __call__(self):
        self.calls += 1
        return self.value


def test_memoization(tmp_path):
    cache = ScoreCache(tmp_path)
    key = CacheKey("v", 10, "clip")
    fn = Counter()
    assert cache_get_or_compute(cache, key, fn) == 0.5
    assert cache_get_or_compute(cache, key, fn) == 0.5
    assert fn.calls == 1


def test_persists_across_reopen(tmp_path):
    ScoreCache(tmp_path).put(CacheKey("v", 10, "clip"), 0.25)
    fn = Counter()
    assert ScoreCache(tmp_path).get_or_compute(CacheKey("v", 10, "clip"), fn) == 0.25
    assert fn.calls == 0


def test_model_id_separates_entries(tmp_path):
    cache = ScoreCache(tmp_path)
    cache.put(CacheKey("v", 10, "a"), 0.1)
    cache.put(CacheKey("v", 10, "b"), 0.9)
    assert cache.get(CacheKey("v", 10, "a")) == 0.1
    assert cache.get(CacheKey("v", 10, "b")) == 0.9


def test_corrupt_entry_recomputed(tmp_path, caplog):
    cache = ScoreCache(tmp_path)
    key = CacheKey("v", 3, "clip")
    cache.put(key, 0.75)
    lines = cache.path.read_text().splitlines()
    rec = json.loads(lines[1])
    rec["s"] = float(0.5).hex()  # checksum no longer matches
    cache.path.write_text("\n".join([lines[0], json.dumps(rec), "not json"]) + "\n")
    reopened = ScoreCache(tmp_path)
    assert reopened.stats()["corrupt_entries"] == 1
    assert reopened.stats()["unreadable_lines"] == 1
    fn = Counter(0.33)
    with caplog.at_level(logging.WARNING):
        assert reopened.get_or_compute(key, fn) == 0.33
    assert fn.calls == 1
    assert "corrupt" in caplog.text
    assert ScoreCache(tmp_path).get(key) == 0.33


def test_bad_header(tmp_path):
    (tmp_path / "scores.log").write_text("something else\n")
    with pytest.raises(CacheFormatError):
        ScoreCache(tmp_path)


def test_stats_and_clear(tmp_path):
    cache = ScoreCache(tmp_path)
    cache.put(CacheKey("v", 1, "m"), 0.1)
    assert cache.path.read_text().startswith(MAGIC + "\n")
    assert cache.stats()["entries"] == 1
    cache.clear()
    assert cache.stats()["entries"] == 0 and not cache.path.exists()


def test_only_similarity_kind():
    with pytest.raises(ValueError):
        CacheKey("v", 1, "m", kind="rel")


def test_concurrent_writers_serialized(tmp_path):
    cache = ScoreCache(tmp_path)

    def work(t):
        for f in range(50):
            cache.put(CacheKey("v", t * 100 + f, "m"), f / 50)

    threads = [threading.Thread(target=work, args=(t,)) for t in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    reopened = ScoreCache(tmp_path)
    assert len(reopened) == 200 and reopened.stats()["unreadable_lines"] == 0


class CountingScorer:
    def __init__(self):
        self.requests = []

    def score(self, query, frames, video_ref):
        self.requests.append(list(frames))
        return [f / 1000 for f in frames]


def test_cached_similarity_batches_misses(tmp_path):
    inner = CountingScorer()
    sim = CachedSimilarity(inner, ScoreCache(tmp_path), "m", lambda ref: ref)
    assert sim.score("q", [1, 2, 3], "v") == [0.001, 0.002, 0.003]
    assert sim.score("q", [2, 3, 4], "v") == [0.002, 0.003, 0.004]
    assert inner.requests == [[1, 2, 3], [4]]
    sim.score("other query", [1], "v")
    assert inner.requests[-1] == [1]


@given(st.floats(allow_nan=False))
def test_round_trip_bits(tmp_path_factory, x):
    d = tmp_path_factory.mktemp("bits")
    ScoreCache(d).put(CacheKey("v", 1, "m"), x)
    got = ScoreCache(d).get(CacheKey("v", 1, "m"))
    assert got.hex() == float(x).hex()
