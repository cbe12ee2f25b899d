"""Function-level memoization over a persistent key-value store.

``MemoCache.memoize`` has the observable behaviour of an instrumented
call site: look the ``(fn_name, arg)`` pair up, return the stored result
on a hit, otherwise run the function, store its result and return it.
Functions take and return one unsigned 32-bit integer.

Simulated time is charged from a :class:`LatencyModel` so experiments do
not depend on the host; :func:`bench_cache` measures the real thing.
"""

from __future__ import annotations

import enum
import statistics
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, MutableMapping

U32_MAX = 2**32 - 1


class CacheError(Exception):
    pass


class UnregisteredFunctionError(CacheError, KeyError):
    pass


class CacheFormatError(CacheError, ValueError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class StoreError(CacheError):
    """The backend refused a write. The computed value rides along."""

    def __init__(self, key: "CacheKey", value: int, cause: BaseException):
        self.key = key
        self.value = value
        super().__init__(f"storing {key} failed: {cause}")


def _check_u32(what: str, x: int) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x <= U32_MAX:
        raise ValueError(f"{what} {x!r} is not an unsigned 32-bit integer")
    return x


@dataclass(frozen=True, slots=True, order=True)
class CacheKey:
    fn_name: str
    arg: int

    def __post_init__(self):
        if not self.fn_name or "," in self.fn_name or "/" in self.fn_name or "\n" in self.fn_name:
            raise ValueError(f"invalid function name {self.fn_name!r}")
        _check_u32("arg", self.arg)

    def __str__(self) -> str:
        return f"{self.fn_name}/{self.arg}"

    @classmethod
    def parse(cls, text: str) -> "CacheKey":
        name, _, arg = text.rpartition("/")
        return cls(name, int(arg))


@dataclass(frozen=True, slots=True)
class CacheEntry:
    key: CacheKey
    value: int
    stored_at: float


@dataclass(frozen=True)
class LatencyModel:
    """Per-operation cost in nanoseconds."""

    hit_ns: int
    miss_ns: int
    store_ns: int

    def __post_init__(self):
        for name in ("hit_ns", "miss_ns", "store_ns"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    def scaled(self, factor: float) -> "LatencyModel":
        return LatencyModel(
            round(self.hit_ns * factor), round(self.miss_ns * factor), round(self.store_ns * factor)
        )

    def replace(self, **kw) -> "LatencyModel":
        fields_ = {"hit_ns": self.hit_ns, "miss_ns": self.miss_ns, "store_ns": self.store_ns}
        fields_.update({k: int(v) for k, v in kw.items()})
        return LatencyModel(**fields_)


# in-memory key-value store measurements
TABLE_MEM = LatencyModel(hit_ns=1455, miss_ns=1348, store_ns=2262273)
# slower store on a 2.6 GHz host
SEC_631 = LatencyModel(hit_ns=7_000, miss_ns=10_000, store_ns=368_000)
# flat 1 ms memoization overhead
OVERHEAD_1MS = LatencyModel(hit_ns=1_000_000, miss_ns=1_000_000, store_ns=1_000_000)
ZERO = LatencyModel(0, 0, 0)

LATENCY_PRESETS = {
    "table-mem": TABLE_MEM,
    "sec-631": SEC_631,
    "1ms": OVERHEAD_1MS,
    "zero": ZERO,
}


def latency_preset(name: str) -> LatencyModel:
    try:
        return LATENCY_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown latency preset {name!r}; choose from {sorted(LATENCY_PRESETS)}") from None


class Provenance(enum.Enum):
    HIT = "hit"
    COMPUTED = "computed"


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0
    stores: int = 0
    accounted_ns: int = 0


@dataclass
class MemoCache:
    """Thread-safe memo table.

    Concurrent misses on the same key may each run the function; the last
    store wins. Counters are updated under a lock.
    """

    latency: LatencyModel = TABLE_MEM
    backend: MutableMapping = field(default_factory=dict)
    stats: CacheStats = field(default_factory=CacheStats)
    _functions: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def register(self, fn_name: str, fn: Callable[[int], int]) -> None:
        CacheKey(fn_name, 0)
        self._functions[fn_name] = fn

    def memoized(self, fn_name: str | None = None):
        """Decorator: register ``fn`` and return a wrapper that memoizes it."""

        def deco(fn):
            name = fn_name or fn.__name__
            self.register(name, fn)

            def wrapper(arg: int) -> int:
                return self.memoize(name, arg)[0]

            wrapper.__wrapped__ = fn
            wrapper.__name__ = getattr(fn, "__name__", name)
            return wrapper

        return deco

    def _fn(self, fn_name: str):
        try:
            return self._functions[fn_name]
        except KeyError:
            raise UnregisteredFunctionError(fn_name) from None

    def _charge(self, ns: int, **counts) -> None:
        with self._lock:
            self.stats.accounted_ns += ns
            for k, v in counts.items():
                setattr(self.stats, k, getattr(self.stats, k) + v)

    def _store(self, key: CacheKey, value: int) -> None:
        try:
            self.backend[key] = CacheEntry(key, value, time.time())
        except Exception as exc:
            raise StoreError(key, value, exc) from exc
        self._charge(self.latency.store_ns, stores=1)

    def memoize(self, fn_name: str, arg: int) -> tuple[int, Provenance]:
        fn = self._fn(fn_name)
        key = CacheKey(fn_name, arg)
        entry = self.backend.get(key)
        if entry is not None:
            self._charge(self.latency.hit_ns, hits=1)
            return entry.value, Provenance.HIT
        self._charge(self.latency.miss_ns, misses=1)
        value = _check_u32(f"{fn_name}({arg}) result", fn(arg))
        self._store(key, value)
        return value, Provenance.COMPUTED

    def precompute(self, fn_name: str, args) -> int:
        """Compute and store every absent ``(fn_name, arg)``; return how many were stored."""
        fn = self._fn(fn_name)
        stored = 0
        for arg in args:
            key = CacheKey(fn_name, arg)
            if key in self.backend:
                continue
            value = _check_u32(f"{fn_name}({arg}) result", fn(arg))
            self._store(key, value)
            stored += 1
        return stored

    def get(self, fn_name: str, arg: int) -> int | None:
        entry = self.backend.get(CacheKey(fn_name, arg))
        return None if entry is None else entry.value

    def __contains__(self, key) -> bool:
        return key in self.backend

    def __len__(self) -> int:
        return len(self.backend)

    def entries(self) -> list[CacheEntry]:
        return sorted(self.backend.values(), key=lambda e: e.key)

    def persist(self, path) -> int:
        """Write ``fn_name,arg,value`` records sorted by key."""
        entries = self.entries()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for e in entries:
                fh.write(f"{e.key.fn_name},{e.key.arg},{e.value}\n")
        return len(entries)

    def load(self, path) -> int:
        """Merge a snapshot into this cache. Later records win over earlier ones."""
        path = Path(path)
        loaded = {}
        now = time.time()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 3:
                    raise CacheFormatError(path, lineno, f"expected fn_name,arg,value, got {line!r}")
                try:
                    key = CacheKey(parts[0], int(parts[1]))
                    value = _check_u32("value", int(parts[2]))
                except ValueError as exc:
                    raise CacheFormatError(path, lineno, str(exc)) from None
                loaded[key] = CacheEntry(key, value, now)
        self.backend.update(loaded)
        return len(loaded)

    @classmethod
    def from_snapshot(cls, path, **kw) -> "MemoCache":
        cache = cls(**kw)
        cache.load(path)
        return cache


@dataclass(frozen=True)
class BenchRow:
    op: str
    median_ns: float
    mean_ns: float
    iterations: int


def _busy_wait_ns(ns: int) -> None:
    end = time.perf_counter_ns() + ns
    while time.perf_counter_ns() < end:
        pass


def bench_cache(iterations: int = 10_000, compute_ns: int = 1_000_000, compute_iterations: int = 200) -> list[BenchRow]:
    """Time cache hit, miss and store on this host.

    ``miss`` is a failed lookup, ``store`` an insert, ``hit`` a
    successful lookup, each through the same path ``memoize`` uses. The
    ``computed_call`` row is a full miss + compute + store of a function
    that busy-waits ``compute_ns``; it gets fewer repetitions.
    """
    if iterations < 1000:
        raise ValueError("iterations must be >= 1000")
    cache = MemoCache(latency=ZERO)
    cache.register("bench", lambda x: x)
    backend = cache.backend
    keys = [CacheKey("bench", i) for i in range(iterations)]
    clock = time.perf_counter_ns

    miss, store, hit = [], [], []
    for k in keys:
        t0 = clock()
        backend.get(k)
        miss.append(clock() - t0)
    for i, k in enumerate(keys):
        e = CacheEntry(k, i, 0.0)
        t0 = clock()
        backend[k] = e
        store.append(clock() - t0)
    for k in keys:
        t0 = clock()
        backend.get(k).value
        hit.append(clock() - t0)

    slow = MemoCache(latency=ZERO)
    slow.register("slow", lambda x: (_busy_wait_ns(compute_ns), x)[1])
    computed = []
    for i in range(compute_iterations):
        t0 = clock()
        slow.memoize("slow", i)
        computed.append(clock() - t0)

    def row(op, xs):
        return BenchRow(op, float(statistics.median(xs)), float(statistics.fmean(xs)), len(xs))

    return [row("hit", hit), row("miss", miss), row("store", store), row("computed_call", computed)]
