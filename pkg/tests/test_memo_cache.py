import random
import threading
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infobattery.memo_cache import (
    LATENCY_PRESETS,
    OVERHEAD_1MS,
    SEC_631,
    TABLE_MEM,
    CacheFormatError,
    CacheKey,
    LatencyModel,
    MemoCache,
    Provenance,
    StoreError,
    UnregisteredFunctionError,
    bench_cache,
    latency_preset,
)


def _counting(fn):
    calls = Counter()

    def wrapped(x):
        calls[x] += 1
        return fn(x)

    return wrapped, calls


def test_computed_then_hit():
    c = MemoCache()
    c.register("sq", lambda x: x * x)
    assert c.memoize("sq", 7) == (49, Provenance.COMPUTED)
    assert c.memoize("sq", 7) == (49, Provenance.HIT)


def test_value_42_and_latency_accounting():
    c = MemoCache(latency=TABLE_MEM)
    c.register("answer", lambda x: 42)
    assert c.memoize("answer", 1)[0] == 42
    assert c.memoize("answer", 1)[0] == 42
    assert c.stats.accounted_ns == 1348 + 2262273 + 1455
    assert (c.stats.hits, c.stats.misses, c.stats.stores) == (1, 1, 1)


def test_counters_over_many_calls():
    c = MemoCache()
    c.register("id", lambda x: x)
    for i in range(1000):
        c.memoize("id", i)
    for i in range(1000):
        c.memoize("id", i)
    assert (c.stats.misses, c.stats.hits, c.stats.stores) == (1000, 1000, 1000)


def test_decorator():
    c = MemoCache()
    fn, calls = _counting(lambda x: x + 1)

    @c.memoized("inc")
    def inc(x):
        return fn(x)

    assert inc(1) == 2 and inc(1) == 2
    assert calls[1] == 1


def test_precompute_counts():
    c = MemoCache()
    c.register("f", lambda x: 3 * x)
    assert c.precompute("f", [1, 2, 3]) == 3
    assert c.precompute("f", [1, 2, 3]) == 0
    d = MemoCache()
    d.register("f", lambda x: x)
    for a in range(4):
        d.memoize("f", a)
    assert d.precompute("f", range(10)) == 6
    assert d.memoize("f", 9)[1] is Provenance.HIT


def test_persist_load_round_trip(tmp_path):
    c = MemoCache()
    c.register("g", lambda x: (x * 2654435761) % 2**32)
    c.register("h", lambda x: x ^ 0xFFFF)
    for a in random.Random(0).sample(range(2**32), 200):
        c.memoize("g", a)
        c.memoize("h", a)
    p = tmp_path / "snap.csv"
    assert c.persist(p) == 400
    back = MemoCache.from_snapshot(p)
    assert [(e.key, e.value) for e in back.entries()] == [(e.key, e.value) for e in c.entries()]
    again = tmp_path / "again.csv"
    back.persist(again)
    assert again.read_text() == p.read_text()


def test_duplicate_records_last_wins(tmp_path):
    p = tmp_path / "dup.csv"
    p.write_text("f,1,10\nf,2,20\nf,1,11\n")
    c = MemoCache.from_snapshot(p)
    assert c.get("f", 1) == 11
    assert len(c) == 2


@pytest.mark.parametrize("body,line", [
    ("f,1,10\nf,1\n", 2),
    ("f,x,1\n", 1),
    ("f,1,10\n\nf,2,-3\n", 3),
    ("f,1,99999999999\n", 1),
])
def test_corrupt_snapshot_names_line(tmp_path, body, line):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(CacheFormatError) as ei:
        MemoCache.from_snapshot(p)
    assert ei.value.line == line


def test_unregistered_function():
    with pytest.raises(UnregisteredFunctionError):
        MemoCache().memoize("nope", 1)
    with pytest.raises(UnregisteredFunctionError):
        MemoCache().precompute("nope", [1])


def test_store_failure_carries_value():
    class Broken(dict):
        def __setitem__(self, k, v):
            raise OSError("disk full")

    c = MemoCache(backend=Broken())
    c.register("f", lambda x: x + 5)
    with pytest.raises(StoreError) as ei:
        c.memoize("f", 1)
    assert ei.value.value == 6
    assert isinstance(ei.value.__cause__, OSError)


def test_key_validation():
    with pytest.raises(ValueError):
        CacheKey("f", -1)
    with pytest.raises(ValueError):
        CacheKey("f", 2**32)
    with pytest.raises(ValueError):
        CacheKey("a,b", 1)
    assert CacheKey.parse(str(CacheKey("f", 9))) == CacheKey("f", 9)
    c = MemoCache()
    c.register("neg", lambda x: -1)
    with pytest.raises(ValueError):
        c.memoize("neg", 1)


def test_threads_share_cache():
    c = MemoCache()
    c.register("f", lambda x: x * 3)
    errors = []

    def worker(seed):
        rng = random.Random(seed)
        for _ in range(2000):
            a = rng.randrange(100)
            if c.memoize("f", a)[0] != 3 * a:
                errors.append(a)

    ts = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert not errors
    assert c.stats.hits + c.stats.misses == 16000
    assert len(c) == 100


@given(st.lists(st.tuples(st.sampled_from(["p", "q"]), st.integers(0, 2**32 - 1)), max_size=300))
def test_memoized_equals_direct(calls):
    fns = {"p": lambda x: (x * 7 + 1) % 2**32, "q": lambda x: x // 3}
    c = MemoCache()
    counted = {}
    for name, fn in fns.items():
        counted[name] = _counting(fn)
        c.register(name, counted[name][0])
    for name, a in calls:
        assert c.memoize(name, a)[0] == fns[name](a)
    for name, (_, calls_) in counted.items():
        assert all(v == 1 for v in calls_.values())


def test_presets():
    assert latency_preset("table-mem") == LatencyModel(1455, 1348, 2262273)
    assert latency_preset("sec-631") == SEC_631 == LatencyModel(7000, 10000, 368000)
    assert OVERHEAD_1MS.hit_ns == 1_000_000
    assert set(LATENCY_PRESETS) == {"table-mem", "sec-631", "1ms", "zero"}
    with pytest.raises(ValueError):
        latency_preset("fast")


def test_bench_rows():
    rows = {r.op: r for r in bench_cache(iterations=1000, compute_iterations=20)}
    assert set(rows) == {"hit", "miss", "store", "computed_call"}
    assert rows["computed_call"].median_ns >= 1_000_000
    with pytest.raises(ValueError):
        bench_cache(iterations=10)
