"""Information Batteries: storing opportunity power as precomputed results.

Modules
-------
trace
    5-minute LMP traces: CSV ingest, synthetic bursty traces, opportunity windows.
price_predict
    Hour-ahead price baselines and a confusion-matrix opportunity classifier.
task_predict
    n-gram next-call predictor.
memo_cache
    Function-level memoization over a persistent key-value store.
scheduler
    Deadline-aware placement and the 5-minute precompute manager.
simulator
    Interval-level cycle accounting, with a compiled kernel when built.
cost
    Capacity and lithium-ion cost comparison.
"""

from importlib.resources import files

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled data file (``sample_trace.csv``, ``cyclic_calls.csv``)."""
    return files(__name__) / "data" / name
