"""Interval-by-interval Information Battery simulation.

For each 5-minute interval the run decides whether opportunity power is
predicted, spends the precompute budget on speculative jobs if so, then
serves the interval's demand from the pool of useful precomputed results
or by computing on the spot. Every cycle of work is charged to
opportunity power when the interval's price really is below threshold
and to grid power otherwise; false-positive precompute therefore burns
grid power. A traditional system serving the same demand without
precompute or cache overheads is accounted alongside.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from ..memo_cache import latency_preset
from ..price_predict import ClassifierSpec, classify_array
from ..scheduler import PrecomputeManager
from ..task_predict import CallTrace, NGramModel
from ..trace import INTERVAL_S, PriceTrace
from ..units import parse_duration
from . import backend
from .params import NS_PER_S, IntervalRecord, ParameterError, SimParams, SimResult

RESULT_COLUMNS = (
    "param_value",
    "cycles_avail",
    "cycles_op",
    "cycles_grid",
    "cycles_grid_traditional",
    "savings_cycles",
    "success",
)
INTERVAL_COLUMNS = tuple(f.name for f in fields(IntervalRecord))


def _window(trace: PriceTrace, params: SimParams) -> tuple[np.ndarray, np.ndarray]:
    n = params.intervals
    if len(trace) < n:
        raise ParameterError(
            f"trace has {len(trace)} intervals ({trace.days:.2f} days); {params.days} days requested"
        )
    actual = trace.lmp[:n] < params.threshold
    spec = ClassifierSpec(params.fp_rate, params.fn_rate, params.threshold, params.seed)
    predicted = classify_array(actual, spec)
    return actual, predicted


def run_sim(
    trace: PriceTrace, params: SimParams, record: bool = False, kernel: str | None = None
) -> tuple[SimResult, list[IntervalRecord]]:
    """Simulate ``params.days`` days of ``trace``.

    Returns the run totals and, when ``record`` is set, one
    :class:`IntervalRecord` per interval (an empty list otherwise).
    """
    actual, predicted = _window(trace, params)
    job, hit, miss, store = params.unit_costs
    totals, recs = backend.get_kernel(kernel)(
        actual.view(np.uint8),
        predicted.view(np.uint8),
        job,
        hit,
        miss,
        store,
        params.jobs_per_interval,
        params.task_hit_rate,
        params.seed,
        params.capacity_cycles,
        record,
    )
    result = SimResult.from_totals(totals)
    records: list[IntervalRecord] = []
    if record:
        rec_op, rec_grid, rec_hits, rec_misses = (r.tolist() for r in recs)
        ts = trace.timestamps[: params.intervals].tolist()
        records = [
            IntervalRecord(ts[i], bool(actual[i]), bool(predicted[i]), rec_op[i], rec_grid[i],
                           rec_hits[i], rec_misses[i])
            for i in range(len(ts))
        ]
    return result, records


def run_sim_live(
    trace: PriceTrace, params: SimParams, calls: CallTrace, model: NGramModel
) -> tuple[SimResult, dict]:
    """Variant that precomputes what the n-gram model actually predicts.

    Demand is drawn in order from ``calls`` (wrapping around), and a
    demanded call hits when a precomputed result for the same function is
    pooled. ``task_hit_rate`` is ignored; the effective rate comes back in
    the second return value.
    """
    if not len(calls):
        raise ParameterError("live predictor needs a nonempty call trace")
    actual, predicted = _window(trace, params)
    job, hit, miss, store = params.unit_costs
    cps = params.cycles_per_second
    names = calls.names
    budget = params.precompute_budget_cycles
    manager = PrecomputeManager(model, budget / cps, (job + store) / cps)
    recent = names[: model.order]
    cursor = 0
    pool: Counter = Counter()
    t = dict.fromkeys(
        ("avail", "op", "grid", "total", "trad_op", "trad_grid",
         "hits", "misses", "precomputed", "useful", "pool_left"),
        0,
    )
    consumed_precomputed = 0
    jobs = params.jobs_per_interval
    start = trace.start
    for i in range(params.intervals):
        neg = bool(actual[i])
        spent = 0
        plan = manager.step(start + i * INTERVAL_S, bool(predicted[i]), recent) if budget > 0 else None
        if plan is not None:
            spent = min(budget, round(plan.used_seconds * cps))
            pool.update(plan.tasks)
            t["precomputed"] += len(plan.tasks)
        demand = 0
        for _ in range(jobs):
            name = names[cursor % len(names)]
            cursor += 1
            if pool[name] > 0:
                pool[name] -= 1
                consumed_precomputed += 1
                t["hits"] += 1
                demand += hit
            else:
                t["misses"] += 1
                demand += miss + job
            recent = (recent + [name])[-model.order :]
        used = spent + demand
        t["total"] += used
        if neg:
            t["op"] += used
            t["avail"] += params.capacity_cycles
            t["trad_op"] += jobs * job
        else:
            t["grid"] += used
            t["trad_grid"] += jobs * job
    t["useful"] = consumed_precomputed
    t["pool_left"] = sum(pool.values())
    rate = consumed_precomputed / t["precomputed"] if t["precomputed"] else 0.0
    return SimResult.from_totals(t), {"effective_hit_rate": rate}


# --- sweeps -----------------------------------------------------------------

def _float(v):
    return float(v)


def _duration_ns(v):
    return round(parse_duration(v) * NS_PER_S)


SWEEP_PARAMETERS = {
    "task_hit_rate": lambda p, v: p.replace(task_hit_rate=_float(v)),
    "fp_rate": lambda p, v: p.replace(fp_rate=_float(v)),
    "fn_rate": lambda p, v: p.replace(fn_rate=_float(v)),
    "job_cost": lambda p, v: p.replace(job_cost=parse_duration(v)),
    "jobs_per_interval": lambda p, v: p.replace(jobs_per_interval=int(v)),
    "threshold": lambda p, v: p.replace(threshold=_float(v)),
    "latency": lambda p, v: p.replace(latency=latency_preset(str(v))),
    "latency_scale": lambda p, v: p.replace(latency=p.latency.scaled(_float(v))),
    "store_latency": lambda p, v: p.replace(latency=p.latency.replace(store_ns=_duration_ns(v))),
    "hit_latency": lambda p, v: p.replace(latency=p.latency.replace(hit_ns=_duration_ns(v))),
    "miss_latency": lambda p, v: p.replace(latency=p.latency.replace(miss_ns=_duration_ns(v))),
}


def apply_parameter(params: SimParams, name: str, value) -> SimParams:
    try:
        setter = SWEEP_PARAMETERS[name]
    except KeyError:
        raise ParameterError(
            f"unknown sweep parameter {name!r}; choose from {', '.join(sorted(SWEEP_PARAMETERS))}"
        ) from None
    return setter(params, value)


@dataclass(frozen=True)
class SweepRow:
    param_value: object
    cycles_avail: float
    cycles_op: float
    cycles_grid: float
    cycles_grid_traditional: float
    savings_cycles: float
    success: bool
    runs: int = 1

    def as_csv(self) -> list:
        return [getattr(self, c) for c in RESULT_COLUMNS]


def _mean_row(value, results: list[SimResult]) -> SweepRow:
    def avg(attr):
        return math.fsum(getattr(r, attr) for r in results) / len(results)

    grid = avg("cycles_grid")
    trad = avg("cycles_grid_traditional")
    return SweepRow(
        value,
        avg("cycles_avail"),
        avg("cycles_op"),
        grid,
        trad,
        trad - grid,
        grid < trad,
        len(results),
    )


def _run_point(args):
    trace, params, kernel = args
    return run_sim(trace, params, kernel=kernel)[0]


def sweep(
    base: SimParams,
    parameter: str,
    values,
    trace: PriceTrace,
    seeds=None,
    workers: int = 1,
    kernel: str | None = None,
) -> list[SweepRow]:
    """One row per value; rows average over ``seeds`` (default: ``base.seed``).

    Every row sees the same trace and the same seed family, so differences
    between rows come from the swept parameter alone.
    """
    values = list(values)
    if not values:
        raise ParameterError("sweep needs at least one value")
    seeds = [base.seed] if seeds is None else list(seeds)
    if not seeds:
        raise ParameterError("sweep needs at least one seed")
    points = [(v, apply_parameter(base, parameter, v)) for v in values]
    jobs = [(trace, p.replace(seed=s), kernel) for _, p in points for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    per = len(seeds)
    return [_mean_row(v, results[i * per : (i + 1) * per]) for i, (v, _) in enumerate(points)]


def write_results_csv(rows, path_or_file) -> None:
    """Write sweep rows (or ``(param_value, SimResult)`` pairs)."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for row in rows:
            if isinstance(row, SweepRow):
                w.writerow(row.as_csv())
            else:
                value, res = row
                w.writerow([value] + [getattr(res, c) for c in RESULT_COLUMNS[1:]])
    finally:
        if own:
            fh.close()


def write_interval_log(records: list[IntervalRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INTERVAL_COLUMNS)
        for r in records:
            w.writerow([getattr(r, c) for c in INTERVAL_COLUMNS])
