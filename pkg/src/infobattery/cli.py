"""``infobattery`` command line.

Every command writes CSV (to ``--out`` or standard output). A YAML
config file of ``option: value`` pairs (option names as in ``--help``,
with dashes or underscores) supplies defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

import yaml

from . import data_path
from .cost import (
    GRID_STORAGE_USD_PER_KWH,
    LITHIUM_ION_USD_PER_KWH,
    IBCapacitySpec,
    battery_equivalent,
    ib_capacity,
    naive_storage_cost,
)
from .memo_cache import LATENCY_PRESETS, bench_cache, latency_preset
from .price_predict import MODELS, score_mae
from .simulator import (
    BACKEND,
    SWEEP_PARAMETERS,
    ParameterError,
    SimParams,
    run_sim,
    run_sim_live,
    sweep,
    write_interval_log,
    write_results_csv,
)
from .task_predict import NGramModel, read_call_trace, top1_accuracy, train
from .trace import TraceError, ingest_trace, opportunity_windows, synth_trace, write_trace
from .units import format_energy, format_usd, parse_duration, parse_power

log = logging.getLogger("infobattery")

DEFAULT_SEED = 0
SAMPLE_TRACE = "sample_trace.csv"
SAMPLE_NODE = "SYNTH"
CYCLIC_CALLS = "cyclic_calls.csv"


class CLIError(Exception):
    pass


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _note(args, msg: str) -> None:
    """Human-readable summary: stdout when CSV goes to a file, else stderr."""
    print(msg, file=sys.stdout if args.out not in (None, "-") else sys.stderr)


# --- trace source -------------------------------------------------------------

def _load_trace(args):
    if getattr(args, "synth_days", None):
        return synth_trace(args.seed, args.synth_days, args.synth_negative_fraction, node=args.node or SAMPLE_NODE)
    path = args.trace
    node = args.node
    if path is None:
        path = data_path(SAMPLE_TRACE)
        node = node or SAMPLE_NODE
    if not Path(path).exists():
        raise CLIError(f"trace file not found: {path}")
    if node is None:
        raise CLIError("--node is required with --trace")
    return ingest_trace(path, node, fill=args.fill)


def _sim_params(args) -> SimParams:
    latency = latency_preset(args.latency)
    if args.latency_scale != 1.0:
        latency = latency.scaled(args.latency_scale)
    overrides = {
        "hit_ns": args.hit_latency,
        "miss_ns": args.miss_latency,
        "store_ns": args.store_latency,
    }
    overrides = {k: round(parse_duration(v) * 1e9) for k, v in overrides.items() if v is not None}
    if overrides:
        latency = latency.replace(**overrides)
    return SimParams(
        latency=latency,
        task_hit_rate=args.hit_rate,
        fp_rate=args.fp,
        fn_rate=args.fn,
        job_cost=parse_duration(args.job_cost),
        jobs_per_interval=args.jobs_per_interval,
        threshold=args.threshold,
        days=args.days,
        seed=args.seed,
        cycles_per_second=args.cycles_per_second,
        machines=args.machines,
    )


def _summary(res) -> str:
    return (
        f"cycles_avail={res.cycles_avail:.6g} cycles_op={res.cycles_op:.6g} "
        f"cycles_grid={res.cycles_grid:.6g} cycles_grid_traditional={res.cycles_grid_traditional:.6g} "
        f"savings={res.savings_cycles:.6g} success={res.success}"
    )


# --- commands -----------------------------------------------------------------

def cmd_ingest(args) -> int:
    if not Path(args.trace).exists():
        raise CLIError(f"trace file not found: {args.trace}")
    trace = ingest_trace(args.trace, args.node, fill=args.fill)
    windows = opportunity_windows(trace, args.threshold)
    if args.out not in (None, "-"):
        write_trace(trace, args.out)
    neg = float((trace.lmp < args.threshold).mean())
    print(
        f"node={trace.node} intervals={len(trace)} days={trace.days:.2f} "
        f"below_threshold_fraction={neg:.4f} windows={len(windows)}"
    )
    return 0


def cmd_synth(args) -> int:
    trace = synth_trace(args.seed, args.days, args.negative_fraction, node=args.node, mean_burst=args.mean_burst)
    if args.out in (None, "-"):
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(("timestamp", "node", "lmp_usd_per_mwh"))
        for t, p in zip(trace.timestamps.tolist(), trace.lmp.tolist()):
            w.writerow((t, trace.node, repr(p)))
    else:
        write_trace(trace, args.out)
        print(f"wrote {len(trace)} intervals to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    trace = _load_trace(args)
    params = _sim_params(args)
    if args.live_predictor:
        calls = read_call_trace(args.calls or data_path(CYCLIC_CALLS))
        model = train([calls], order=args.order)
        res, info = run_sim_live(trace, params, calls, model)
        records = []
        extra = f" effective_hit_rate={info['effective_hit_rate']:.4f}"
    else:
        res, records = run_sim(trace, params, record=bool(args.interval_log))
        extra = ""
    with _output(args.out) as fh:
        write_results_csv([("base", res)], fh)
    if args.interval_log:
        if not records:
            raise CLIError("--interval-log is not available with --live-predictor")
        write_interval_log(records, args.interval_log)
    _note(args, _summary(res) + extra)
    return 0


def _parse_values(text: str) -> list[str]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise CLIError("--values is empty")
    return values


def cmd_sweep(args) -> int:
    if args.param not in SWEEP_PARAMETERS:
        raise CLIError(f"unknown sweep parameter {args.param!r}; choose from {', '.join(sorted(SWEEP_PARAMETERS))}")
    values = _parse_values(args.values)
    trace = _load_trace(args)
    base = _sim_params(args)
    seeds = range(args.seed, args.seed + args.seeds)
    rows = sweep(base, args.param, values, trace, seeds=seeds, workers=args.workers)
    with _output(args.out) as fh:
        write_results_csv(rows, fh)
    for r in rows:
        _note(args, f"{args.param}={r.param_value} savings={r.savings_cycles:.6g} success={r.success}")
    return 0


def cmd_bench(args) -> int:
    rows = bench_cache(args.iterations)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("op", "median_ns", "mean_ns", "iterations"))
        for r in rows:
            w.writerow((r.op, f"{r.median_ns:.1f}", f"{r.mean_ns:.1f}", r.iterations))
        for name in ("table-mem", "sec-631"):
            lat = LATENCY_PRESETS[name]
            for op, ns in (("hit", lat.hit_ns), ("miss", lat.miss_ns), ("store", lat.store_ns)):
                w.writerow((f"preset:{name}:{op}", ns, ns, 0))
    return 0


def cmd_capacity(args) -> int:
    spec = IBCapacitySpec(parse_power(args.power), parse_duration(args.horizon), args.accuracy)
    energy = ib_capacity(spec)
    quote = battery_equivalent(energy, args.price)
    naive = None
    if args.naive_twh is not None:
        naive = naive_storage_cost(args.naive_twh, args.naive_price, args.hours)
    print(f"{'power':<22}{spec.power_draw:.6g} W")
    print(f"{'horizon':<22}{spec.horizon:.6g} s")
    print(f"{'accuracy':<22}{spec.accuracy:g}")
    print(f"{'ib capacity':<22}{format_energy(energy)}")
    print(f"{'battery equivalent':<22}{quote.capacity_kwh:,.0f} kWh")
    print(f"{'battery cost':<22}{format_usd(quote.total_usd)} at ${quote.price_per_kwh:g}/kWh")
    if naive is not None:
        print(f"{'naive storage cost':<22}{format_usd(naive)} ({args.naive_twh:g} TWh/yr, {args.hours:g} h)")
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("power_w", "horizon_s", "accuracy", "energy_j", "capacity_kwh", "price_per_kwh", "total_usd", "naive_usd"))
        w.writerow((spec.power_draw, spec.horizon, spec.accuracy, energy, quote.capacity_kwh,
                    quote.price_per_kwh, quote.total_usd, "" if naive is None else naive))
    return 0


def cmd_predict_price(args) -> int:
    trace = _load_trace(args)
    split = tuple(float(x) for x in args.split.split(","))
    if len(split) != 2:
        raise CLIError("--split takes train,validation fractions")
    scores = score_mae(args.model, trace, split=split, order=args.ar_order, dataset=args.dataset)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("model", "dataset", "split", "mae"))
        for s in scores:
            w.writerow((s.model, s.dataset, s.split, f"{s.mae:.6f}"))
    return 0


def cmd_train_tasks(args) -> int:
    path = args.calls or data_path(CYCLIC_CALLS)
    if not Path(path).exists():
        raise CLIError(f"call trace not found: {path}")
    model = train([read_call_trace(path)], order=args.order, smoothing=args.smoothing)
    if args.out in (None, "-"):
        raise CLIError("train-tasks needs --out for the model file")
    model.dump(args.out)
    print(f"trained order-{model.order} model on {path}: {len(model.counts)} contexts -> {args.out}")
    return 0


def cmd_eval_tasks(args) -> int:
    path = args.calls or data_path(CYCLIC_CALLS)
    for p in (args.model, path):
        if not Path(p).exists():
            raise CLIError(f"file not found: {p}")
    model = NGramModel.load(args.model)
    acc = top1_accuracy(model, read_call_trace(path), n=args.n, context_len=args.context)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("order", "n", "context_len", "top1_accuracy"))
        w.writerow((model.order, args.n, args.context, f"{acc:.6f}"))
    return 0


# --- parser ---------------------------------------------------------------------

GLOBAL_DESTS = ("seed", "out", "config", "verbose")


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # flags may appear before or after the subcommand; the subcommand copies
    # use SUPPRESS so they do not overwrite values given before it
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d(DEFAULT_SEED), help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("--out", default=d(None), help="output file (default: standard output)")
    p.add_argument("--config", default=d(None), help="YAML file of option defaults")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return p


def _trace_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--trace", help="price CSV (default: bundled sample trace)")
    src.add_argument("--synth-days", type=int, help="use a synthetic trace of this many days instead")
    p.add_argument("--synth-negative-fraction", type=float, default=0.05)
    p.add_argument("--node", help="node to read from --trace")
    p.add_argument("--fill", choices=("reject", "hold"), default="reject", help="gap policy")


def _sim_flags(p: argparse.ArgumentParser) -> None:
    _trace_flags(p)
    d = SimParams()
    p.add_argument("--days", type=int, default=d.days)
    p.add_argument("--job-cost", default="10s", help="job duration, e.g. 100ms, 10s, 1min")
    p.add_argument("--jobs-per-interval", type=int, default=d.jobs_per_interval)
    p.add_argument("--hit-rate", type=float, default=d.task_hit_rate, help="task prediction hit rate")
    p.add_argument("--fp", type=float, default=d.fp_rate, help="price predictor false-positive rate")
    p.add_argument("--fn", type=float, default=d.fn_rate, help="price predictor false-negative rate")
    p.add_argument("--threshold", type=float, default=d.threshold, help="opportunity price threshold, USD/MWh")
    p.add_argument("--latency", choices=sorted(LATENCY_PRESETS), default="table-mem")
    p.add_argument("--latency-scale", type=float, default=1.0)
    p.add_argument("--hit-latency", help="override hit latency, e.g. 2us")
    p.add_argument("--miss-latency", help="override miss latency")
    p.add_argument("--store-latency", help="override store latency, e.g. 100ms")
    p.add_argument("--machines", type=int, default=d.machines)
    p.add_argument("--cycles-per-second", type=float, default=d.cycles_per_second)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="infobattery", description="Information Battery toolkit", parents=[_global_flags(False)]
    )
    glob = _global_flags(True)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, parents=[glob])
        p.set_defaults(func=func)
        subs[name] = p
        return p

    p = add("ingest", cmd_ingest, "validate a price CSV, optionally writing the cleaned trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--node", required=True)
    p.add_argument("--fill", choices=("reject", "hold"), default="reject")
    p.add_argument("--threshold", type=float, default=0.0)

    p = add("synth", cmd_synth, "generate a bursty synthetic price trace")
    p.add_argument("--days", type=int, default=100)
    p.add_argument("--negative-fraction", type=float, default=0.05)
    p.add_argument("--mean-burst", type=float, default=12.0, help="mean surplus run, in intervals")
    p.add_argument("--node", default=SAMPLE_NODE)

    p = add("simulate", cmd_simulate, "run one simulation")
    _sim_flags(p)
    p.add_argument("--interval-log", help="write per-interval records to this CSV")
    p.add_argument("--live-predictor", action="store_true", help="drive precompute with the n-gram model")
    p.add_argument("--calls", help="call trace for --live-predictor (default: bundled cyclic trace)")
    p.add_argument("--order", type=int, default=3)

    p = add("sweep", cmd_sweep, "sweep one parameter")
    _sim_flags(p)
    p.add_argument("--param", required=True, help=", ".join(sorted(SWEEP_PARAMETERS)))
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seeds", type=int, default=1, help="average each row over this many seeds")
    p.add_argument("--workers", type=int, default=1)

    p = add("bench", cmd_bench, "measure cache hit/miss/store latency on this host")
    p.add_argument("--iterations", type=int, default=10_000)

    p = add("capacity", cmd_capacity, "IB storage capacity and battery-equivalent cost")
    p.add_argument("--power", default="100MW")
    p.add_argument("--horizon", default="24h")
    p.add_argument("--accuracy", type=float, default=1.0)
    p.add_argument("--price", type=float, default=LITHIUM_ION_USD_PER_KWH, help="battery USD/kWh")
    p.add_argument("--naive-twh", type=float, help="also price naive storage of this much TWh/yr")
    p.add_argument("--naive-price", type=float, default=GRID_STORAGE_USD_PER_KWH)
    p.add_argument("--hours", type=float, default=1.0)

    p = add("predict-price", cmd_predict_price, "score a price baseline by MAE")
    _trace_flags(p)
    p.add_argument("--model", choices=MODELS, default="persistence")
    p.add_argument("--ar-order", type=int, default=12)
    p.add_argument("--split", default="0.8,0.2")
    p.add_argument("--dataset", help="label for the dataset column (default: node)")

    p = add("train-tasks", cmd_train_tasks, "train the n-gram task predictor")
    p.add_argument("--calls", help="call trace CSV (default: bundled cyclic trace)")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--smoothing", type=float, default=0.0)

    p = add("eval-tasks", cmd_eval_tasks, "top-1 accuracy of a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--calls", help="held-out call trace (default: bundled cyclic trace)")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--context", type=int, default=10)

    return parser, subs


def _apply_config(argv, parser, subs) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    path = Path(known.config)
    if not path.exists():
        raise CLIError(f"config file not found: {path}")
    cfg = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(cfg, dict):
        raise CLIError(f"{path}: expected a mapping of option: value")
    command = next((a for a in rest if a in subs), None)
    target = subs.get(command, parser)
    dests = {a.dest for a in target._actions}
    root, local = {}, {}
    for key, value in cfg.items():
        dest = str(key).replace("-", "_")
        if dest in GLOBAL_DESTS:
            root[dest] = value
        elif dest in dests:
            local[dest] = value
        else:
            raise CLIError(f"{path}: unknown option {key!r} for {command or 'infobattery'}")
    parser.set_defaults(**root)
    target.set_defaults(**local)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config(argv, parser, subs)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
        log.debug("simulation kernel: %s", BACKEND)
        return args.func(args)
    except (CLIError, ParameterError, TraceError, ValueError, OSError) as exc:
        print(f"infobattery: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
