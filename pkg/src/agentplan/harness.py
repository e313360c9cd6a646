"""Command-line front end and experiment runners.

Subcommands::

    agentplan plan      --topology F [--model M]
    agentplan simulate  --topology F [--model M] [--agent-base-bytes B] [--payload-bytes P]
    agentplan compare   (--topology F | --n N --seed S) [--models ...] [--format csv|json]
    agentplan scaling   --sizes 5,10,15 --trials T --seed S [--format csv|json]
    agentplan gen       --n N --seed S [--weight-range LO HI] [--extra-edge-fraction F]

Exit codes: 0 ok, 1 parse/input error, 2 validation failure, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from agentplan.baselines import make
from agentplan.planner import MODELS, InvariantViolation, Plan, check_plan, plan_summary, within
from agentplan.simulator import SimConfig, collection_report, simulate
from agentplan.topology import (
    Topology,
    TopologyError,
    TopologyParseError,
    format_number,
    generate_random,
    load_topology,
    serialize_topology,
    validate,
)

log = logging.getLogger("agentplan")

CSV_HEADER = ("nodes", "model", "partitions", "agents", "makespan", "traffic_byte_hops", "seed")
EXIT_PARSE, EXIT_INVALID, EXIT_INVARIANT = 1, 2, 3


@dataclass(frozen=True)
class CompareRow:
    nodes: int
    model: str
    partitions: int
    agents: int
    makespan: float
    traffic_byte_hops: int
    seed: int | None = None


@dataclass(frozen=True)
class AggregateRow:
    nodes: int
    model: str
    trials: int
    mean_agents: float
    mean_makespan: float
    mean_traffic_byte_hops: float


def _num(x):
    """JSON-friendly number: integral floats become ints."""
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer, np.floating)):
        return _num(obj.item())
    return _num(obj)


# ------------------------------------------------------------ experiments

def check_models(plans: dict[str, Plan]) -> None:
    """Cross-model identities: equal mmap/interactive makespan and agent ordering."""
    delta = next(iter(plans.values())).delta
    n = plans[next(iter(plans))].node_count
    if "mmap" in plans and not (within(plans["mmap"].makespan, delta) and within(delta, plans["mmap"].makespan)):
        raise InvariantViolation(f"mmap makespan {plans['mmap'].makespan} != delta {delta}")
    if "interactive" in plans:
        if plans["interactive"].makespan != delta or plans["interactive"].agent_count != n:
            raise InvariantViolation("interactive plan must take delta with one agent per node")
    if "accumulative" in plans:
        acc = plans["accumulative"]
        if acc.agent_count != 1 or not within(delta, acc.makespan):
            raise InvariantViolation("accumulative plan must use one agent and take at least delta")
    if "mmap" in plans and not 1 <= plans["mmap"].agent_count <= n:
        raise InvariantViolation("mmap agent count outside [1, n]")


def compare(
    t: Topology,
    models: tuple[str, ...] = MODELS,
    cfg: SimConfig = SimConfig(),
    seed: int | None = None,
) -> list[CompareRow]:
    plans = {m: make(m, t) for m in models}
    for p in plans.values():
        check_plan(t, p)
    check_models(plans)
    rows = []
    for m, p in plans.items():
        metrics, traces = simulate(t, p, cfg)
        scale = cfg.time_scale or 1.0
        if not np.isclose(metrics.makespan, p.makespan * scale, rtol=1e-9):
            raise InvariantViolation(f"{m}: simulated makespan differs from plan")
        if not collection_report(traces, t).complete:
            raise InvariantViolation(f"{m}: incomplete collection")
        rows.append(CompareRow(p.node_count, m, len(p.partitions), p.agent_count,
                               metrics.makespan, metrics.traffic_byte_hops, seed))
    return rows


def trial_seed(seed: int, n: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, n, trial]).generate_state(1)[0])


def _run_trial(args) -> list[CompareRow]:
    n, trial, seed, weight_range, extra, models, cfg = args
    s = trial_seed(seed, n, trial)
    t = generate_random(n + 1, s, weight_range, extra)
    return compare(t, models, cfg, seed=s)


def scaling(
    sizes: list[int],
    trials: int,
    seed: int,
    weight_range: tuple[int, int] = (10, 100),
    extra_edge_fraction: float = 0.2,
    models: tuple[str, ...] = MODELS,
    cfg: SimConfig = SimConfig(),
    jobs: int = 1,
) -> tuple[list[CompareRow], list[AggregateRow]]:
    """Random-topology sweep; ``sizes`` count managed (non-home) nodes.

    Trials may run in worker processes but results are always merged in
    (size, trial) order, so output does not depend on ``jobs``.
    """
    if not sizes or any(n < 1 for n in sizes):
        raise ValueError("sizes must be a non-empty list of positive integers")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = [(n, k, seed, weight_range, extra_edge_fraction, models, cfg) for n in sizes for k in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            batches = list(pool.map(_run_trial, tasks))
    else:
        batches = [_run_trial(task) for task in tasks]
    rows = [r for batch in batches for r in batch]

    aggregates = []
    for n in sizes:
        for m in models:
            sel = [r for r in rows if r.nodes == n and r.model == m]
            aggregates.append(AggregateRow(
                n, m, len(sel),
                statistics.fmean(r.agents for r in sel),
                statistics.fmean(r.makespan for r in sel),
                statistics.fmean(r.traffic_byte_hops for r in sel),
            ))
    return rows, aggregates


# ------------------------------------------------------------- formatting

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_number(v)
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        writer.writerow([f.name for f in fields(rows[0])])
    for r in rows:
        writer.writerow([_cell(getattr(r, f.name)) for f in fields(r)])
    return buf.getvalue()


def compare_rows_from_csv(text: str) -> list[CompareRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    return [
        CompareRow(int(r["nodes"]), r["model"], int(r["partitions"]), int(r["agents"]),
                   float(r["makespan"]), int(r["traffic_byte_hops"]),
                   int(r["seed"]) if r["seed"] else None)
        for r in reader
    ]


def compare_rows_from_json(text: str) -> list[CompareRow]:
    data = json.loads(text)
    items = data["rows"] if isinstance(data, dict) else data
    return [CompareRow(**{**r, "makespan": float(r["makespan"])}) for r in items]


def plan_to_dict(p: Plan, time_scale: float | None = None) -> dict:
    s = time_scale or 1.0
    summary = plan_summary(p)
    return _jsonable({
        "model": summary.model,
        "nodes": summary.nodes,
        "partition_count": summary.partitions,
        "agents": summary.agents,
        "delta": summary.delta * s,
        "makespan": summary.makespan * s,
        "partitions": [part.nodes for part in p.partitions],
        "anchors": [part.anchor for part in p.partitions],
        "walks": [[[node, time * s] for node, time in part.walk.hops] for part in p.partitions],
    })


# -------------------------------------------------------------------- CLI

def _weight_range(values) -> tuple[int, int]:
    lo, hi = values
    return (lo, hi)


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid sizes {text!r}") from None
    if not sizes or any(n < 1 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers, e.g. 5,10,15")
    return sizes


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--agent-base-bytes", type=int, default=512, help="agent code size carried on every hop")
    p.add_argument("--payload-bytes", type=int, default=None, help="override every node's MIB payload size")
    p.add_argument("--time-scale", type=_positive_float, default=None, help="multiply reported times by this factor")
    p.add_argument("--interactive-traffic", choices=("out_and_back", "hop_chain"), default="out_and_back")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agentplan", description="Multi mobile-agent MIB collection planner.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="partition a topology and print the plan as JSON")
    p.add_argument("--topology", required=True)
    p.add_argument("--model", choices=MODELS, default="mmap")
    p.add_argument("--time-scale", type=_positive_float, default=None)
    p.add_argument("--output")

    p = sub.add_parser("simulate", help="run a plan and print metrics and agent traces as JSON")
    p.add_argument("--topology", required=True)
    p.add_argument("--model", choices=MODELS, default="mmap")
    p.add_argument("--mib-seed", type=int, default=None, help="attach synthetic MIB records to traces")
    _sim_flags(p)
    p.add_argument("--output")

    p = sub.add_parser("compare", help="compare the three models on one topology")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--topology")
    src.add_argument("--n", type=int, help="generate a random topology with N nodes (home included)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-range", type=int, nargs=2, default=(10, 100), metavar=("LO", "HI"))
    p.add_argument("--extra-edge-fraction", type=float, default=0.2)
    p.add_argument("--models", nargs="+", choices=MODELS, default=list(MODELS))
    _sim_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")

    p = sub.add_parser("scaling", help="sweep random topologies of several sizes")
    p.add_argument("--sizes", type=_sizes, default=[5, 10, 15, 20, 25, 30], help="managed node counts, e.g. 5,10,15")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-range", type=int, nargs=2, default=(10, 100), metavar=("LO", "HI"))
    p.add_argument("--extra-edge-fraction", type=float, default=0.2)
    p.add_argument("--models", nargs="+", choices=MODELS, default=list(MODELS))
    p.add_argument("--jobs", type=int, default=1)
    _sim_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")

    p = sub.add_parser("gen", help="write a random topology file")
    p.add_argument("--n", type=int, required=True, help="node count, home included")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-range", type=int, nargs=2, default=(10, 100), metavar=("LO", "HI"))
    p.add_argument("--extra-edge-fraction", type=float, default=0.0)
    p.add_argument("--output")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_valid(path: str) -> Topology:
    t = load_topology(path)
    report = validate(t)
    if not report.ok:
        raise TopologyError("invalid topology: " + "; ".join(report.violations))
    return t


def _sim_config(args) -> SimConfig:
    return SimConfig(
        agent_base_bytes=args.agent_base_bytes,
        payload_override_bytes=args.payload_bytes,
        time_scale=args.time_scale,
        interactive_traffic_mode=args.interactive_traffic,
        mib_seed=getattr(args, "mib_seed", None),
    )


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _cmd_plan(args) -> None:
    t = _load_valid(args.topology)
    p = make(args.model, t)
    check_plan(t, p)
    _emit(_dump(plan_to_dict(p, args.time_scale)), args.output)


def _cmd_simulate(args) -> None:
    t = _load_valid(args.topology)
    p = make(args.model, t)
    check_plan(t, p)
    metrics, traces = simulate(t, p, _sim_config(args))
    report = collection_report(traces, t)
    out = {
        "metrics": asdict(metrics),
        "complete": report.complete,
        "traces": [
            {
                "agent_id": tr.agent_id,
                "anchor": tr.anchor,
                "events": [asdict(e) for e in tr.events],
                **({"records": [asdict(r) for r in tr.records]} if tr.records else {}),
            }
            for tr in traces
        ],
    }
    _emit(_dump(_jsonable(out)), args.output)


def _cmd_compare(args) -> None:
    if args.topology:
        t, seed = _load_valid(args.topology), None
    else:
        t, seed = generate_random(args.n, args.seed, _weight_range(args.weight_range), args.extra_edge_fraction), args.seed
    rows = compare(t, tuple(args.models), _sim_config(args), seed)
    if args.format == "csv":
        _emit(rows_to_csv(rows), args.output)
    else:
        _emit(_dump(_jsonable([asdict(r) for r in rows])), args.output)


def _cmd_scaling(args) -> None:
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    rows, aggregates = scaling(
        args.sizes, args.trials, args.seed, _weight_range(args.weight_range),
        args.extra_edge_fraction, tuple(args.models), _sim_config(args), args.jobs,
    )
    if args.format == "csv":
        _emit(rows_to_csv(rows) + "\n" + rows_to_csv(aggregates), args.output)
    else:
        _emit(_dump(_jsonable({"rows": [asdict(r) for r in rows],
                               "aggregates": [asdict(a) for a in aggregates]})), args.output)


def _cmd_gen(args) -> None:
    t = generate_random(args.n, args.seed, _weight_range(args.weight_range), args.extra_edge_fraction)
    _emit(serialize_topology(t), args.output)


COMMANDS = {
    "plan": _cmd_plan,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "scaling": _cmd_scaling,
    "gen": _cmd_gen,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except TopologyParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (TopologyError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0
