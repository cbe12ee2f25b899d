from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

from ..memo_cache import TABLE_MEM, LatencyModel
from ..trace import INTERVAL_S

NS_PER_S = 1_000_000_000
INTERVAL_NS = INTERVAL_S * NS_PER_S
# int64 headroom for the compiled kernel's accumulators
_MAX_TOTAL = 2**62


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SimParams:
    """Inputs of one simulated run.

    ``job_cost`` is in seconds of single-machine compute. Every interval
    offers ``300 s * machines`` of capacity; demand is reserved first and
    the remainder is the precompute budget. Costs are rounded to whole
    cycles at ``cycles_per_second``.
    """

    latency: LatencyModel = TABLE_MEM
    task_hit_rate: float = 0.5
    fp_rate: float = 0.001
    fn_rate: float = 0.001
    job_cost: float = 10.0
    jobs_per_interval: int = 1
    threshold: float = 0.0
    days: int = 100
    seed: int = 0
    cycles_per_second: float = 2.6e9
    machines: int = 1

    def __post_init__(self):
        for name in ("task_hit_rate", "fp_rate", "fn_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {v}")
        if not self.job_cost > 0:
            raise ParameterError(f"job_cost must be > 0, got {self.job_cost}")
        if self.days < 1:
            raise ParameterError("days must be >= 1")
        if self.jobs_per_interval < 0:
            raise ParameterError("jobs_per_interval must be >= 0")
        if self.machines < 1:
            raise ParameterError("machines must be >= 1")
        if not self.cycles_per_second > 0:
            raise ParameterError("cycles_per_second must be > 0")
        if self.job_cycles < 1:
            raise ParameterError("job_cost rounds to 0 cycles")
        if self.reserve_cycles > self.capacity_cycles:
            raise ParameterError(
                f"demand of {self.jobs_per_interval} jobs x {self.job_cost} s does not fit "
                f"in one interval ({INTERVAL_S * self.machines} machine-seconds)"
            )
        if self.intervals * (self.capacity_cycles + self.reserve_cycles) > _MAX_TOTAL:
            raise ParameterError("run too large for 64-bit cycle accounting")

    def cycles(self, ns: int) -> int:
        """Whole machine cycles in ``ns`` nanoseconds."""
        return round(Fraction(ns) * Fraction(self.cycles_per_second) / NS_PER_S)

    @property
    def job_ns(self) -> int:
        return round(self.job_cost * NS_PER_S)

    @property
    def job_cycles(self) -> int:
        return self.cycles(self.job_ns)

    @property
    def unit_costs(self) -> tuple[int, int, int, int]:
        """``(job, hit, miss, store)`` in cycles."""
        lat = self.latency
        return (self.job_cycles, self.cycles(lat.hit_ns), self.cycles(lat.miss_ns), self.cycles(lat.store_ns))

    @property
    def capacity_cycles(self) -> int:
        return self.cycles(INTERVAL_NS * self.machines)

    @property
    def reserve_cycles(self) -> int:
        job, hit, miss, _ = self.unit_costs
        return self.jobs_per_interval * max(hit, job + miss)

    @property
    def precompute_budget_cycles(self) -> int:
        return self.capacity_cycles - self.reserve_cycles

    @property
    def intervals(self) -> int:
        return self.days * 288

    def replace(self, **changes) -> "SimParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SimResult:
    """Totals of one run, in whole machine cycles.

    Every charge is converted to cycles before it is accumulated, so the
    identities between fields hold exactly.
    """

    cycles_avail: int
    cycles_op: int
    cycles_grid: int
    cycles_grid_traditional: int
    cycles_total_ib: int
    cycles_total_traditional: int
    savings_cycles: int
    success: bool
    cycles_op_traditional: int = 0
    hits: int = 0
    misses: int = 0
    precomputed: int = 0
    useful: int = 0
    pool_left: int = 0

    @classmethod
    def from_totals(cls, t: dict) -> "SimResult":
        assert t["op"] + t["grid"] == t["total"]
        return cls(
            cycles_avail=t["avail"],
            cycles_op=t["op"],
            cycles_grid=t["grid"],
            cycles_grid_traditional=t["trad_grid"],
            cycles_total_ib=t["total"],
            cycles_total_traditional=t["trad_op"] + t["trad_grid"],
            savings_cycles=t["trad_grid"] - t["grid"],
            success=t["grid"] < t["trad_grid"],
            cycles_op_traditional=t["trad_op"],
            hits=t["hits"],
            misses=t["misses"],
            precomputed=t["precomputed"],
            useful=t["useful"],
            pool_left=t["pool_left"],
        )


@dataclass(frozen=True)
class IntervalRecord:
    interval_start: int
    actual_negative: bool
    predicted_negative: bool
    op_cycles_used: int
    grid_cycles_used: int
    cache_hits: int
    cache_misses: int
