"""Stateless counter-based random numbers.

Every random decision in the package is a pure function of
``(seed, stream, counter)`` so results do not depend on evaluation order
and the compiled simulator kernel can reproduce them bit for bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0

# stream identifiers; keep in sync with simulator/_kernel.pyx
STREAM_PRICE = 1
STREAM_HIT = 2


def _mix(z: int) -> int:
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def hash64(seed: int, stream: int, counter: int) -> int:
    return _mix(_mix(_mix(seed & MASK64) ^ (stream & MASK64)) ^ (counter & MASK64))


def uniform(seed: int, stream: int, counter: int) -> float:
    """Uniform double in [0, 1) with 53 random bits."""
    return (hash64(seed, stream, counter) >> 11) * _INV_2_53


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def uniform_array(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """Vectorised :func:`uniform` over an array of counters."""
    counters = np.asarray(counters).astype(np.uint64)
    with np.errstate(over="ignore"):
        base = _mix(_mix(seed & MASK64) ^ (stream & MASK64))
        h = _mix_array(np.uint64(base) ^ counters)
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53
