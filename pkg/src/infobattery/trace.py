"""5-minute locational marginal price (LMP) traces.

Ingests and validates price CSVs, generates bursty synthetic traces, and
finds the opportunity-power windows where the price sits below a
threshold.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

INTERVAL_S = 300
INTERVALS_PER_DAY = 288
HEADER = ("timestamp", "node", "lmp_usd_per_mwh")
# 2019-01-01T00:00:00Z
DEFAULT_START = 1546300800


class TraceError(ValueError):
    pass


class TraceParseError(TraceError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class TraceValidationError(TraceError):
    def __init__(self, message: str, timestamp: int | None = None):
        self.timestamp = timestamp
        super().__init__(message)


@dataclass(frozen=True, slots=True)
class PricePoint:
    timestamp: int
    node: str
    lmp: float

    def __post_init__(self):
        if self.timestamp % INTERVAL_S:
            raise TraceValidationError(
                f"timestamp {self.timestamp} is not on the 5-minute grid", self.timestamp
            )
        if not math.isfinite(self.lmp):
            raise TraceValidationError(f"non-finite price at {self.timestamp}", self.timestamp)


@dataclass(frozen=True, slots=True)
class OpportunityWindow:
    """Half-open span ``[start, end)`` of intervals priced below ``threshold``."""

    start: int
    end: int
    threshold: float

    def __contains__(self, t: int) -> bool:
        return self.start <= t < self.end

    @property
    def intervals(self) -> int:
        return (self.end - self.start) // INTERVAL_S


class PriceTrace:
    """An evenly spaced, single-node LMP series.

    Stored column-wise (``timestamps`` int64, ``lmp`` float64); both arrays
    are read-only so a trace can be shared freely.
    """

    __slots__ = ("node", "timestamps", "lmp")

    def __init__(self, node: str, timestamps, lmp):
        ts = np.array(timestamps, dtype=np.int64)
        prices = np.array(lmp, dtype=np.float64)
        if ts.ndim != 1 or ts.shape != prices.shape:
            raise TraceValidationError("timestamps and prices must be 1-d and equally long")
        if len(ts) == 0:
            raise TraceValidationError("empty trace")
        off = np.flatnonzero(ts % INTERVAL_S)
        if off.size:
            bad = int(ts[off[0]])
            raise TraceValidationError(f"timestamp {bad} is not on the 5-minute grid", bad)
        steps = np.diff(ts)
        wrong = np.flatnonzero(steps != INTERVAL_S)
        if wrong.size:
            bad = int(ts[wrong[0] + 1])
            raise TraceValidationError(
                f"spacing violated at timestamp {bad}: expected {int(ts[wrong[0]]) + INTERVAL_S}",
                bad,
            )
        nonfinite = np.flatnonzero(~np.isfinite(prices))
        if nonfinite.size:
            bad = int(ts[nonfinite[0]])
            raise TraceValidationError(f"non-finite price at timestamp {bad}", bad)
        ts.setflags(write=False)
        prices.setflags(write=False)
        self.node = node
        self.timestamps = ts
        self.lmp = prices

    @classmethod
    def from_points(cls, points) -> "PriceTrace":
        points = list(points)
        if not points:
            raise TraceValidationError("empty trace")
        nodes = {p.node for p in points}
        if len(nodes) != 1:
            raise TraceValidationError(f"points span several nodes: {sorted(nodes)}")
        return cls(points[0].node, [p.timestamp for p in points], [p.lmp for p in points])

    @property
    def points(self) -> list[PricePoint]:
        return [PricePoint(int(t), self.node, float(p)) for t, p in zip(self.timestamps, self.lmp)]

    @property
    def start(self) -> int:
        return int(self.timestamps[0])

    @property
    def days(self) -> float:
        return len(self) / INTERVALS_PER_DAY

    def __len__(self) -> int:
        return len(self.timestamps)

    def __iter__(self) -> Iterator[PricePoint]:
        return iter(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceTrace):
            return NotImplemented
        return (
            self.node == other.node
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.lmp, other.lmp)
        )

    def __repr__(self) -> str:
        return f"PriceTrace(node={self.node!r}, start={self.start}, intervals={len(self)})"

    def head(self, intervals: int) -> "PriceTrace":
        return PriceTrace(self.node, self.timestamps[:intervals], self.lmp[:intervals])

    def negative_mask(self, threshold: float = 0.0) -> np.ndarray:
        return self.lmp < threshold


def _parse_rows(path: Path, node: str):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise TraceParseError(path, 1, f"expected header {','.join(HEADER)!r}, got {header!r}")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise TraceParseError(path, line, f"expected 3 fields, got {len(row)}")
            ts_s, row_node, lmp_s = (f.strip() for f in row)
            try:
                ts = int(ts_s)
            except ValueError:
                raise TraceParseError(path, line, f"bad timestamp {ts_s!r}") from None
            try:
                lmp = float(lmp_s)
            except ValueError:
                raise TraceParseError(path, line, f"bad price {lmp_s!r}") from None
            if not math.isfinite(lmp):
                raise TraceParseError(path, line, f"non-finite price {lmp_s!r}")
            if row_node == node:
                yield ts, lmp


def ingest_trace(path, node: str, fill: str = "reject") -> PriceTrace:
    """Load a price CSV, keep ``node``'s rows and check 5-minute spacing.

    ``fill="hold"`` carries the last price across missing intervals;
    the default rejects any gap.
    """
    if fill not in ("reject", "hold"):
        raise ValueError(f"unknown fill policy {fill!r}")
    path = Path(path)
    rows = sorted(_parse_rows(path, node))
    if not rows:
        raise TraceValidationError(f"no rows for node {node!r} in {path}")
    for (t0, _), (t1, _) in zip(rows, rows[1:]):
        if t1 == t0:
            raise TraceValidationError(f"duplicate timestamp {t1}", t1)
    for t, _ in rows:
        if t % INTERVAL_S:
            raise TraceValidationError(f"timestamp {t} is not on the 5-minute grid", t)
    if fill == "hold":
        filled = [rows[0]]
        for t, p in rows[1:]:
            prev_t, prev_p = filled[-1]
            for missing in range(prev_t + INTERVAL_S, t, INTERVAL_S):
                filled.append((missing, prev_p))
            filled.append((t, p))
        rows = filled
    return PriceTrace(node, [t for t, _ in rows], [p for _, p in rows])


def write_trace(trace: PriceTrace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for t, p in zip(trace.timestamps.tolist(), trace.lmp.tolist()):
            w.writerow((t, trace.node, repr(p)))


def synth_trace(
    seed: int,
    days: int,
    negative_fraction: float,
    node: str = "SYNTH",
    mean_burst: float = 12.0,
    start: int = DEFAULT_START,
) -> PriceTrace:
    """Synthetic trace whose negative prices arrive in bursts.

    A two-state Markov chain (normal / surplus) is sampled with stationary
    surplus probability ``negative_fraction`` and mean surplus run length
    ``mean_burst`` intervals. Normal intervals get a diurnal price with
    noise, floored at $0.50/MWh; surplus intervals get a negative price.
    Prices are rounded to 4 decimals so CSV round trips are exact.
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    if not 0.0 <= negative_fraction <= 1.0:
        raise ValueError(f"negative_fraction must be in [0, 1], got {negative_fraction}")
    if mean_burst < 1.0:
        raise ValueError("mean_burst must be >= 1 interval")
    n = days * INTERVALS_PER_DAY
    rng = np.random.default_rng(seed)
    surplus = np.zeros(n, dtype=bool)
    q = negative_fraction
    if q >= 1.0:
        surplus[:] = True
    elif q > 0.0:
        p_exit = 1.0 / mean_burst
        p_enter = min(1.0, q * p_exit / (1.0 - q))
        u = rng.random(n)
        state = u[0] < q
        for i in range(n):
            if i:
                state = (u[i] >= p_exit) if state else (u[i] < p_enter)
            surplus[i] = state
    hours = (np.arange(n) % INTERVALS_PER_DAY) / 12.0
    diurnal = 28.0 + 12.0 * np.sin(2 * np.pi * (hours - 9.0) / 24.0)
    normal = np.maximum(diurnal + rng.normal(0.0, 6.0, n), 0.5)
    negative = -rng.gamma(2.0, 6.0, n) - 0.01
    lmp = np.round(np.where(surplus, negative, normal), 4)
    ts = start + INTERVAL_S * np.arange(n, dtype=np.int64)
    return PriceTrace(node, ts, lmp)


def opportunity_windows(trace: PriceTrace, threshold: float) -> list[OpportunityWindow]:
    """Maximal runs of intervals with ``lmp < threshold`` (strict)."""
    below = trace.lmp < threshold
    if not below.any():
        return []
    padded = np.concatenate(([False], below, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    t0 = trace.start
    return [
        OpportunityWindow(t0 + INTERVAL_S * int(a), t0 + INTERVAL_S * int(b), threshold)
        for a, b in zip(starts, ends)
    ]
