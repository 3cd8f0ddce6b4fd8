"""Batch runs over configurations, orientations and adversary strategies."""
from __future__ import annotations

import itertools
from collections import Counter
from typing import Callable, Iterable, Optional, Sequence

from .adversary import AdversaryStrategy, GreedySeparator, NoRemoval, PersistentEdge, RandomEdge
from .config import classify
from .harness import ResultKind, expected_kind, run_simulation
from .protocols import ProtocolId, round_bound
from .ring import Direction, RingTopology

StrategyFactory = Callable[[RingTopology], Sequence[AdversaryStrategy]]


def canonical_configs(n: int, ks: Optional[Iterable[int]] = None) -> list[tuple[int, ...]]:
    """One homebase set per rotation class, as its lexicographically smallest rotation."""
    ks = range(2, n + 1) if ks is None else ks
    out = []
    for k in ks:
        seen = set()
        for combo in itertools.combinations(range(n), k):
            canon = min(tuple(sorted((h - s) % n for h in combo)) for s in combo)
            if canon not in seen:
                seen.add(canon)
                out.append(canon)
    return out


def orientation_assignments(k: int, chirality: bool) -> list[tuple[Direction, ...]]:
    if chirality:
        return [(Direction.CW,) * k]
    return list(itertools.product((Direction.CW, Direction.CCW), repeat=k))


def strategy_suite(topology: RingTopology, seeds: int = 20) -> list[AdversaryStrategy]:
    """NoRemoval, RandomEdge over ``seeds`` seeds, PersistentEdge on every edge, GreedySeparator."""
    suite: list[AdversaryStrategy] = [NoRemoval()]
    suite += [RandomEdge(s) for s in range(seeds)]
    suite += [PersistentEdge(e) for e in range(topology.n)]
    suite.append(GreedySeparator())
    return suite


def _fmt(values) -> str:
    return " ".join(str(getattr(v, "name", v)) for v in values)


def sweep(
    protocols: Sequence[ProtocolId],
    configs: Iterable[tuple[int, Sequence[int]]],
    strategies: StrategyFactory = strategy_suite,
    max_rounds: Optional[Callable[[ProtocolId, int], int]] = None,
    all_orientations: bool = True,
    on_row: Optional[Callable[[dict], None]] = None,
) -> list[dict]:
    """Run every protocol x configuration x orientation x strategy cell.

    ``max_rounds(protocol, n)`` defaults to the protocol's round bound, which is also
    the bound the margin column is measured against.
    """
    bound_of = max_rounds or round_bound
    rows = []
    for n, hbs in configs:
        topology = RingTopology(n, tuple(hbs))
        cls = classify(topology)
        for pid in protocols:
            bound = bound_of(pid, n)
            expected = expected_kind(topology, pid)
            if all_orientations:
                oris = orientation_assignments(topology.k, pid.chirality)
            else:
                oris = [(Direction.CW,) * topology.k]
            cache: dict = {}
            for ori in oris:
                for strat in strategies(topology):
                    res = run_simulation(topology, pid, strat, bound, ori, record_trace=False, tick_cache=cache)
                    row = {
                        "protocol": str(pid),
                        "n": n,
                        "homebases": _fmt(topology.homebases),
                        "class": cls.kind.value,
                        "orientations": _fmt(ori),
                        "strategy": strat.describe(),
                        "expected": expected.value,
                        "outcome": res.outcome.value,
                        "rounds": res.rounds,
                        "bound": bound,
                        "margin": bound - res.rounds,
                        "ok": res.outcome is expected,
                    }
                    rows.append(row)
                    if on_row is not None:
                        on_row(row)
    return rows


def summarize(rows: Sequence[dict]) -> str:
    if not rows:
        return "no cells"
    lines = []
    by_protocol: dict[str, list[dict]] = {}
    for r in rows:
        by_protocol.setdefault(r["protocol"], []).append(r)
    for name, rs in by_protocol.items():
        outcomes = Counter(r["outcome"] for r in rs)
        bad = sum(not r["ok"] for r in rs)
        worst = min(r["margin"] for r in rs)
        gathered = [r["rounds"] for r in rs if r["outcome"] == ResultKind.GATHERED.value]
        most = max(gathered) if gathered else "-"
        parts = ", ".join(f"{k}={v}" for k, v in sorted(outcomes.items()))
        lines.append(f"{name}: {len(rs)} cells ({parts}); wrong outcome {bad}; max rounds to gather {most}; min margin {worst}")
    return "\n".join(lines)
