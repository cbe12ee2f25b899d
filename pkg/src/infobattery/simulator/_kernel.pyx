# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel; mirrors ``_kernel_py.run_kernel`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MUL1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MUL2 = 0x94D049BB133111EBULL
cdef double TWO_53 = 9007199254740992.0
# keep in sync with infobattery._rng
cdef uint64_t STREAM_HIT = 2


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = z + GOLDEN
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


def run_kernel(actual, predicted, int64_t job, int64_t hit, int64_t miss,
               int64_t store, int64_t jobs, double hit_rate, seed,
               int64_t capacity, bint record):
    cdef const uint8_t[::1] act = np.ascontiguousarray(actual, dtype=np.uint8)
    cdef const uint8_t[::1] pred = np.ascontiguousarray(predicted, dtype=np.uint8)
    cdef Py_ssize_t n = act.shape[0]
    cdef uint64_t useed = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t base = _mix(_mix(useed) ^ STREAM_HIT)
    # x * 2**-53 < hit_rate  <=>  x < ceil(hit_rate * 2**53) for integer x < 2**53
    cdef uint64_t thresh = <uint64_t>ceil(hit_rate * TWO_53) if 0.0 < hit_rate < 1.0 else 0
    cdef int64_t got

    cdef int64_t unit = job + store
    cdef int64_t worst = job + miss
    if hit > worst:
        worst = hit
    cdef int64_t budget0 = capacity - jobs * worst
    cdef int64_t miss_cost = miss + job

    cdef int64_t avail = 0, op = 0, grid = 0, total = 0, trad_op = 0, trad_grid = 0
    cdef int64_t hits = 0, misses = 0, completed = 0, useful = 0, pool = 0, carry = 0
    cdef int64_t budget, spent, done, k, left, h, m, demand, used, j
    cdef bint neg

    cdef int64_t[::1] rec_op, rec_grid, rec_hits, rec_misses
    if record:
        rec_op = np.zeros(n, dtype=np.int64)
        rec_grid = np.zeros(n, dtype=np.int64)
        rec_hits = np.zeros(n, dtype=np.int64)
        rec_misses = np.zeros(n, dtype=np.int64)

    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            neg = act[i] != 0
            spent = 0
            if pred[i]:
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
                    if hit_rate >= 1.0:
                        useful += done
                        pool += done
                    elif hit_rate > 0.0:
                        got = 0
                        for j in range(completed, completed + done):
                            got += (_mix(base ^ <uint64_t>j) >> 11) < thresh
                        useful += got
                        pool += got
                    completed += done
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
    records = None
    if record:
        records = (np.asarray(rec_op), np.asarray(rec_grid), np.asarray(rec_hits), np.asarray(rec_misses))
    return totals, records
