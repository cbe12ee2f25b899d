"""Brute-force reference for the simulator's cycle accounting.

Deliberately naive: every precomputed job is an object in a FIFO, every
charge is appended to a ledger, and totals are summed from the ledger at
the end. Randomness is injected so the same rules can run either on the
package's counter-based draws (exact comparison) or on an unrelated RNG
(statistical comparison).

Rules, per 5-minute interval i:
  capacity C = 300 s * machines; demand J jobs; reserve = J * max(hit, job + miss)
  precompute budget = C - reserve, each precomputed job costs job + store
  1. actual = lmp < threshold
  2. predicted = predictor(i, actual)
  3. if predicted: finish the carried partial job (if any) from the budget,
     then whole jobs, then start one partial job with the leftover; each
     completed job is useful with probability hit_rate and useful ones join
     the pool. Spent budget is charged to opportunity power if actual,
     else grid. If not predicted, any partial job is dropped.
  4. J demands: pop a pooled result -> hit cost; else miss + job cost;
     charged to the interval's actual source
  5. avail += C when actual. Traditional: J * job on the actual source.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass


@dataclass
class Job:
    cost: int
    done: int = 0
    useful: bool = False


def run_oracle(actual, predict, useful_draw, *, job_ns, hit_ns, miss_ns, store_ns,
               jobs, hit_rate, machines=1):
    """``predict(i, actual_i) -> bool``; ``useful_draw(job_index) -> float in [0, 1)``."""
    cap = 300_000_000_000 * machines
    reserve = jobs * max(hit_ns, job_ns + miss_ns)
    assert reserve <= cap
    ledger = []  # (interval, source, kind, ns)
    trad = []
    pool = deque()
    partial = None
    completed = 0
    avail = 0
    hits = misses = 0
    for i, neg in enumerate(actual):
        source = "op" if neg else "grid"
        if predict(i, neg):
            budget = cap - reserve
            while budget > 0:
                if partial is None:
                    partial = Job(job_ns + store_ns)
                step = min(budget, partial.cost - partial.done)
                partial.done += step
                budget -= step
                ledger.append((i, source, "precompute", step))
                if partial.done == partial.cost:
                    partial.useful = useful_draw(completed) < hit_rate
                    completed += 1
                    if partial.useful:
                        pool.append(partial)
                    partial = None
        else:
            partial = None
        for _ in range(jobs):
            if pool:
                pool.popleft()
                hits += 1
                ledger.append((i, source, "hit", hit_ns))
            else:
                misses += 1
                ledger.append((i, source, "miss", miss_ns + job_ns))
            trad.append((source, job_ns))
        if neg:
            avail += cap
    op = sum(ns for _, s, _, ns in ledger if s == "op")
    grid = sum(ns for _, s, _, ns in ledger if s == "grid")
    trad_grid = sum(ns for s, ns in trad if s == "grid")
    return {
        "avail_ns": avail,
        "op_ns": op,
        "grid_ns": grid,
        "total_ns": sum(ns for *_, ns in ledger),
        "trad_grid_ns": trad_grid,
        "trad_total_ns": sum(ns for _, ns in trad),
        "hits": hits,
        "misses": misses,
        "completed": completed,
        "savings_ns": trad_grid - grid,
    }


def random_draws(seed: int, fp: float, fn: float):
    """Predictor and usefulness draws from Python's Mersenne Twister."""
    price_rng = random.Random(f"price-{seed}")
    hit_rng = random.Random(f"hit-{seed}")

    def predict(i, neg):
        u = price_rng.random()
        return u >= fn if neg else u < fp

    def useful(_k):
        return hit_rng.random()

    return predict, useful
