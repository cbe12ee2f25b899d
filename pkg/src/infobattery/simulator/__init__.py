from .backend import BACKEND, get_kernel
from .core import (
    RESULT_COLUMNS,
    SWEEP_PARAMETERS,
    SweepRow,
    apply_parameter,
    run_sim,
    run_sim_live,
    sweep,
    write_interval_log,
    write_results_csv,
)
from .params import IntervalRecord, ParameterError, SimParams, SimResult

__all__ = [
    "BACKEND",
    "IntervalRecord",
    "ParameterError",
    "RESULT_COLUMNS",
    "SWEEP_PARAMETERS",
    "SimParams",
    "SimResult",
    "SweepRow",
    "apply_parameter",
    "get_kernel",
    "run_sim",
    "run_sim_live",
    "sweep",
    "write_interval_log",
    "write_results_csv",
]
