"""Compare the compiled and pure-Python simulation kernels.

Runs the same 100-day simulations through both kernels, checks the
results are identical and prints wall time per kernel.

    python benchmarks/bench_kernel.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import statistics
import time

from infobattery import data_path
from infobattery.memo_cache import OVERHEAD_1MS, TABLE_MEM
from infobattery.simulator import SimParams, run_sim
from infobattery.simulator.backend import KERNELS
from infobattery.trace import ingest_trace

CASES = {
    "10s jobs, 1ms overhead": SimParams(latency=OVERHEAD_1MS, job_cost=10.0),
    "100ms jobs, table-mem": SimParams(latency=TABLE_MEM, job_cost=0.1),
    "100ms jobs, fp=0.1": SimParams(latency=TABLE_MEM, job_cost=0.1, fp_rate=0.1),
    "60s jobs, 4 machines": SimParams(job_cost=60.0, machines=4, jobs_per_interval=3),
}


def _time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    trace = ingest_trace(data_path("sample_trace.csv"), "SYNTH")
    names = sorted(KERNELS)
    if "cython" not in names:
        print("compiled kernel not built; only the python kernel is available")
    print(f"{'case':<26}" + "".join(f"{n + ' (ms)':>16}" for n in names) + f"{'speedup':>10}")
    for label, params in CASES.items():
        results = {n: run_sim(trace, params, kernel=n)[0] for n in names}
        if len({repr(r) for r in results.values()}) != 1:
            raise SystemExit(f"{label}: kernels disagree")
        ms = {n: 1e3 * _time(lambda n=n: run_sim(trace, params, kernel=n), args.repeat) for n in names}
        speedup = ms["python"] / ms["cython"] if "cython" in ms else 1.0
        print(f"{label:<26}" + "".join(f"{ms[n]:>16.1f}" for n in names) + f"{speedup:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
