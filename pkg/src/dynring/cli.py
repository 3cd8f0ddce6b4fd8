"""Command-line entry point: run, classify, check, labels, sweep.

Exit codes: 0 success, 1 counterexample or violation found, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import sys
from typing import Optional, Sequence

from .checker import DEFAULT_STATE_BUDGET, model_check
from .adversary import make_strategy
from .config import ConfigError, classify, compute_inter_distances, delta_min, elect
from .harness import ConfigurationError, expected_kind
from .logic_ring import build_labels
from .protocols import Protocol, ProtocolError, ProtocolId, round_bound
from .ring import RingTopology, TopologyError
from .scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    parse_knows,
    parse_orientations,
    write_table,
    write_trace,
)
from .sweep import canonical_configs, strategy_suite, summarize, sweep

EXIT_OK, EXIT_FOUND, EXIT_CONFIG = 0, 1, 2
_CONFIG_ERRORS = (ScenarioError, ConfigurationError, ProtocolError, TopologyError, ConfigError, ValueError)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _add_world(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--n", type=int, required=required, help="ring size")
    p.add_argument("--homebases", type=_int_list, required=required, help="comma-separated homebase nodes")


def _add_protocol(p: argparse.ArgumentParser) -> None:
    p.add_argument("--protocol", choices=[x.value for x in Protocol], help="default CrossNoChir")
    p.add_argument("--knows", help="what agents know: n, k or nk (default n)")
    p.add_argument("--orientations", help="per-agent global direction of private right, e.g. CW,CCW,CW")
    p.add_argument("--max-rounds", type=int, help="defaults to the protocol's round bound")


_SCENARIO_FLAGS = ("n", "homebases", "protocol", "knows", "adversary", "seed", "max_rounds", "orientations")


def _scenario(args) -> Scenario:
    """Scenario from a file and/or flags; flags given explicitly override the file."""
    given = {a: getattr(args, a, None) for a in _SCENARIO_FLAGS}
    given = {a: v for a, v in given.items() if v is not None}
    if getattr(args, "scenario", None):
        sc = load_scenario(args.scenario)
        for attr, val in given.items():
            setattr(sc, attr, val)
        return sc
    if "n" not in given or "homebases" not in given:
        raise ScenarioError("give a scenario file or --n and --homebases")
    return Scenario(**given)


def cmd_run(args) -> int:
    sc = _scenario(args)
    topology, pid = sc.topology(), sc.protocol_id()
    res = sc.run(record_trace=True)
    print(f"{pid} on n={topology.n} homebases={list(topology.homebases)} vs {sc.strategy().describe()}")
    print(f"class: {classify(topology)}")
    print(f"outcome: {res.verdict}")
    print(f"rounds: {res.rounds} (bound {sc.max_rounds or round_bound(pid, topology.n)})")
    if args.trace_out:
        write_trace(res.trace, args.trace_out)
        print(f"trace: {args.trace_out}")
    expected = expected_kind(topology, pid)
    if res.outcome is not expected:
        print(f"expected {expected.value}")
        return EXIT_FOUND
    return EXIT_OK


def cmd_classify(args) -> int:
    topology = RingTopology(args.n, tuple(args.homebases))
    view = compute_inter_distances(topology)
    best, where = delta_min(view)
    print(f"distances: <{','.join(map(str, view.distances))}>")
    print(f"delta_min: <{','.join(map(str, best))}> at {', '.join(f'{d.name} h{j}' for d, j in where)}")
    print(f"class: {classify(topology)}")
    print(f"leader (no chirality): {elect(topology, chirality=False)}")
    print(f"leader (chirality): {elect(topology, chirality=True)}")
    return EXIT_OK


def cmd_check(args) -> int:
    sc = _scenario(args)
    topology, pid = sc.topology(), sc.protocol_id()
    res = model_check(
        topology,
        pid,
        sc.max_rounds,
        parse_orientations(sc.orientations),
        state_budget=args.budget,
    )
    print(f"{pid} on n={topology.n} homebases={list(topology.homebases)}: {res}")
    return EXIT_OK if res.ok else EXIT_FOUND


def cmd_labels(args) -> int:
    labels = build_labels(args.n, args.anchor)
    rows = labels.table()
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["edge", "S", "X", "Y"])
        for r in rows:
            w.writerow([r["edge"], " ".join(map(str, r["S"])), " ".join(map(str, r["X"])), " ".join(map(str, r["Y"]))])
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"p={labels.p} period={labels.period}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    knows_n, knows_k = parse_knows(args.knows)
    pids = [ProtocolId(Protocol(p), knows_n, knows_k) for p in (args.protocol or ["CrossNoChir"])]
    sizes = args.n or [3, 4, 5, 6]
    configs = [(n, h) for n in sizes for h in canonical_configs(n)]
    if args.adversary == "suite":
        strategies = lambda t: strategy_suite(t, args.seeds)  # noqa: E731
    else:
        specs = [s for s in args.adversary.split(";") if s]
        strategies = lambda t: [make_strategy(s, t, args.seed) for s in specs]  # noqa: E731
    bound = (lambda p, n: args.max_rounds) if args.max_rounds else None
    rows = sweep(pids, configs, strategies, bound, all_orientations=not args.cw_only)
    if args.out:
        write_table(rows, args.out)
    print(summarize(rows))
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FOUND


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynring", description="Gathering on dynamic rings: simulate, classify, model check.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("scenario", nargs="?", help="YAML scenario file")
    _add_world(p, required=False)
    _add_protocol(p)
    p.add_argument("--adversary", help="none (default), random[:p], targeted[:p], persistent:e, greedy, pair[:a,b], symmetric, script:e0,-,e2")
    p.add_argument("--seed", type=int)
    p.add_argument("--trace-out", help="write the per-round trace as JSON lines")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("classify", help="classify a configuration and elect a leader")
    _add_world(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", help="explore every adversary schedule")
    p.add_argument("scenario", nargs="?", help="YAML scenario file")
    _add_world(p, required=False)
    _add_protocol(p)
    p.add_argument("--budget", type=int, default=DEFAULT_STATE_BUDGET, help="state budget")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("labels", help="dump logic-ring labels as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--anchor", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("sweep", help="batch over configurations, orientations and strategies")
    p.add_argument("--n", type=int, action="append", help="ring size (repeatable)")
    p.add_argument("--protocol", action="append", choices=[x.value for x in Protocol], help="repeatable")
    p.add_argument("--knows", default="n")
    p.add_argument("--adversary", default="suite", help="'suite' or ';'-separated strategy forms")
    p.add_argument("--seeds", type=int, default=20, help="random seeds in the suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--cw-only", action="store_true", help="only the all-clockwise orientation")
    p.add_argument("--out", help="CSV table path")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
