"""Deadline-aware task placement and the 5-minute precompute manager."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .task_predict import NGramModel, predict_next
from .trace import INTERVAL_S, OpportunityWindow


class PowerSource(enum.Enum):
    OPPORTUNITY = "opportunity"
    GRID = "grid"


@dataclass(frozen=True)
class Task:
    id: str
    fn_name: str
    arg: int
    cost: float
    deadline: int
    submitted_at: int

    def __post_init__(self):
        if not self.cost > 0:
            raise ValueError(f"task {self.id}: cost must be > 0")
        if self.deadline < self.submitted_at:
            raise ValueError(f"task {self.id}: deadline precedes submission")


@dataclass(frozen=True)
class ScheduledTask:
    task: Task
    start: float
    power_source: PowerSource

    @property
    def finish(self) -> float:
        return self.start + self.task.cost


def place_task(task: Task, now: int, forecast_windows: list[OpportunityWindow]) -> ScheduledTask:
    """Run now on opportunity power, wait for a forecast window, or use the grid.

    An opportunity placement is only made when the task finishes by its
    deadline; otherwise the task runs immediately on grid power.
    """
    now = max(now, task.submitted_at)
    for w in forecast_windows:
        if w.end <= now:
            continue
        start = now if w.start <= now else w.start
        if start + task.cost <= task.deadline:
            return ScheduledTask(task, start, PowerSource.OPPORTUNITY)
        if w.start > now:
            # sorted by start: later windows start even later
            break
    return ScheduledTask(task, now, PowerSource.GRID)


@dataclass(frozen=True)
class PartialTask:
    fn_name: str
    total: float
    done: float

    @property
    def remaining(self) -> float:
        return self.total - self.done


@dataclass(frozen=True)
class PrecomputePlan:
    interval_start: int
    tasks: tuple[str, ...]
    partial: PartialTask | None = None
    used_seconds: float = 0.0


def precompute_step(
    interval_start: int,
    predicted_negative: bool,
    model: NGramModel,
    recent_calls,
    capacity_seconds: float = INTERVAL_S,
    per_task_cost: float = 1.0,
    carry: PartialTask | None = None,
    machines: int = 1,
) -> PrecomputePlan | None:
    """Plan one interval of speculative work.

    Returns ``None`` unless opportunity power is predicted. Capacity is
    ``capacity_seconds * machines`` machine-seconds. A task carried over
    from the previous interval is finished first; the rest of the budget
    goes to ``floor(budget / per_task_cost)`` predicted tasks, and any
    leftover starts one more task that is handed back as ``partial``.
    ``tasks`` lists the tasks that complete inside this interval.
    """
    if capacity_seconds <= 0:
        raise ValueError("capacity_seconds must be > 0")
    if per_task_cost <= 0:
        raise ValueError("per_task_cost must be > 0")
    if not predicted_negative:
        return None
    budget = capacity_seconds * machines
    done: list[str] = []
    used = 0.0
    if carry is not None:
        if carry.remaining <= budget:
            used += carry.remaining
            budget -= carry.remaining
            done.append(carry.fn_name)
        else:
            return PrecomputePlan(
                interval_start, (), PartialTask(carry.fn_name, carry.total, carry.done + budget), budget
            )
    full = math.floor(budget / per_task_cost)
    leftover = budget - full * per_task_cost
    # guard float noise like 300 - 30 * 10.000000001
    start_partial = leftover > 1e-9 * per_task_cost
    count = full + (1 if start_partial else 0)
    names = predict_next(model, recent_calls, count) if count else []
    done.extend(names[:full])
    used += full * per_task_cost
    partial = None
    if start_partial:
        partial = PartialTask(names[-1], per_task_cost, leftover)
        used += leftover
    return PrecomputePlan(interval_start, tuple(done), partial, used)


@dataclass
class PrecomputeManager:
    """Stateful wrapper around :func:`precompute_step` for a run of intervals.

    Decisions are locked at interval boundaries. A partial task survives
    only into a directly following predicted-negative interval.
    """

    model: NGramModel
    capacity_seconds: float = INTERVAL_S
    per_task_cost: float = 1.0
    machines: int = 1
    carry: PartialTask | None = None
    plans: list = field(default_factory=list)

    def step(self, interval_start: int, predicted_negative: bool, recent_calls) -> PrecomputePlan | None:
        plan = precompute_step(
            interval_start,
            predicted_negative,
            self.model,
            recent_calls,
            self.capacity_seconds,
            self.per_task_cost,
            self.carry,
            self.machines,
        )
        self.carry = plan.partial if plan is not None else None
        if plan is not None:
            self.plans.append(plan)
        return plan
