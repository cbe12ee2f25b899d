"""Pure-Python simulation kernel.

Same signature and bit-identical output as the compiled ``_kernel``
extension; used when the extension is not built or when
``INFOBATTERY_PURE_PYTHON`` is set. Costs and capacity are integers in
any one unit (the simulator passes machine cycles); totals come back
in that unit.
"""

from __future__ import annotations

import numpy as np

from .. import _rng


def _count_useful(seed: int, first: int, n: int, hit_rate: float) -> int:
    if n <= 0 or hit_rate <= 0.0:
        return 0
    if hit_rate >= 1.0:
        return n
    u = _rng.uniform_array(seed, _rng.STREAM_HIT, np.arange(first, first + n, dtype=np.uint64))
    return int(np.count_nonzero(u < hit_rate))


def run_kernel(actual, predicted, job, hit, miss, store, jobs, hit_rate, seed, capacity, record):
    actual = np.asarray(actual, dtype=np.uint8).tolist()
    predicted = np.asarray(predicted, dtype=np.uint8).tolist()
    n = len(actual)
    seed &= _rng.MASK64
    unit = job + store
    reserve = jobs * max(hit, job + miss)
    budget0 = capacity - reserve
    miss_cost = miss + job

    avail = op = grid = total = trad_op = trad_grid = 0
    hits = misses = completed = useful = 0
    pool = 0
    carry = 0  # ns still owed on a partially precomputed job
    if record:
        rec_op = np.zeros(n, dtype=np.int64)
        rec_grid = np.zeros(n, dtype=np.int64)
        rec_hits = np.zeros(n, dtype=np.int64)
        rec_misses = np.zeros(n, dtype=np.int64)

    for i in range(n):
        neg = actual[i]
        spent = 0
        if predicted[i]:
            budget = budget0
            done = 0
            if carry:
                if carry <= budget:
                    budget -= carry
                    spent += carry
                    carry = 0
                    done = 1
                else:
                    carry -= budget
                    spent += budget
                    budget = 0
            if budget > 0:
                k = budget // unit
                left = budget - k * unit
                spent += k * unit
                done += k
                if left:
                    carry = unit - left
                    spent += left
            if done:
                got = _count_useful(seed, completed, done, hit_rate)
                completed += done
                useful += got
                pool += got
        else:
            carry = 0

        h = pool if pool < jobs else jobs
        pool -= h
        m = jobs - h
        demand = h * hit + m * miss_cost
        used = spent + demand
        hits += h
        misses += m
        total += spent
        total += demand
        if neg:
            op += used
            avail += capacity
            trad_op += jobs * job
        else:
            grid += used
            trad_grid += jobs * job
        if record:
            if neg:
                rec_op[i] = used
            else:
                rec_grid[i] = used
            rec_hits[i] = h
            rec_misses[i] = m

    totals = {
        "avail": avail,
        "op": op,
        "grid": grid,
        "total": total,
        "trad_op": trad_op,
        "trad_grid": trad_grid,
        "hits": hits,
        "misses": misses,
        "precomputed": completed,
        "useful": useful,
        "pool_left": pool,
    }
    records = (rec_op, rec_grid, rec_hits, rec_misses) if record else None
    return totals, records
