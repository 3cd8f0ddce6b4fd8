"""Breadth-first exploration of every adversary schedule on a small ring.

Each round the adversary may remove nothing or any one edge; removing an edge nobody
tries to cross has the same effect as removing nothing, so only attempted edges are
branched on.  States are deduplicated per depth on the world plus every agent's
behaviour-relevant context (see ``AgentContext.key``).  Agents differ only in their
orientation, so two states that are the same up to swapping equally oriented agents
are merged as well.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .adversary import attempted_edges
from .harness import ResultKind, Verdict, cached_step, expected_kind, gathering_oracle, make_contexts
from .protocols import ProtocolId, round_bound
from .ring import Direction, RingTopology, WorldState, apply_round

DEFAULT_STATE_BUDGET = 10**7


class CheckVerdict(str, Enum):
    ALL_SCHEDULES_GATHER = "AllSchedulesGather"
    COUNTEREXAMPLE = "Counterexample"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass
class CheckResult:
    verdict: CheckVerdict
    states_explored: int
    max_depth: int
    schedule: Optional[list[Optional[int]]] = None  # counterexample schedule
    final: Optional[Verdict] = None  # what the counterexample run ended with
    leaf_outcomes: dict = field(default_factory=dict)  # ResultKind -> count of distinct leaves

    @property
    def ok(self) -> bool:
        return self.verdict is CheckVerdict.ALL_SCHEDULES_GATHER

    def __str__(self) -> str:
        tail = ""
        if self.verdict is CheckVerdict.COUNTEREXAMPLE:
            tail = f", ends {self.final}, schedule {self.schedule}"
        leaves = ", ".join(f"{k.value}={v}" for k, v in sorted(self.leaf_outcomes.items()))
        return f"{self.verdict.value} (states {self.states_explored}, depth {self.max_depth}{tail}; leaves: {leaves})"


def model_check(
    topology: RingTopology,
    protocol: ProtocolId,
    max_rounds: Optional[int] = None,
    orientations: Optional[Sequence[Direction]] = None,
    accept: Optional[Iterable[ResultKind]] = None,
    state_budget: int = DEFAULT_STATE_BUDGET,
    branch: bool = True,
) -> CheckResult:
    """Check that every schedule ends in an accepted outcome within ``max_rounds``.

    ``accept`` defaults to the single outcome the configuration class calls for.  With
    ``branch=False`` only the schedule without removals is explored.
    """
    if max_rounds is None:
        max_rounds = round_bound(protocol, topology.n)
    accepted = set(accept) if accept is not None else {expected_kind(topology, protocol)}
    contexts = make_contexts(topology, protocol, orientations)
    cross = protocol.cross_detection
    world = WorldState.initial(topology)
    # parents[i] = (parent index, missing edge taken to reach node i)
    parents: list[tuple[int, Optional[int]]] = [(-1, None)]
    orient = tuple(int(c.orientation) for c in contexts)
    frontier = [(world, contexts, tuple(c.key() for c in contexts), 0)]
    explored = 0
    leaves: dict[ResultKind, int] = {}
    for depth in range(max_rounds + 1):
        seen: dict[tuple, int] = {}
        # ticks are pure in (orientation, context key, observation); share them across states
        memo: dict[tuple, tuple] = {}
        nxt = []
        for world, contexts, keys, idx in frontier:
            explored += 1
            intents, contexts2, ctx_key = cached_step(world, contexts, keys, cross, memo)
            verdict = gathering_oracle(world, contexts2)
            if verdict is not None:
                leaves[verdict.kind] = leaves.get(verdict.kind, 0) + 1
                if verdict.kind not in accepted:
                    return CheckResult(
                        CheckVerdict.COUNTEREXAMPLE, explored, depth, _schedule(parents, idx), verdict, leaves
                    )
                continue
            choices: list[Optional[int]] = [None]
            if branch:
                choices += attempted_edges(world, intents)
            for m in choices:
                w2 = apply_round(world, m, intents)
                # agents as a multiset: ordering by hash needs no comparable fields, and a
                # hash tie at worst misses a merge
                if cross:
                    key = tuple(sorted(zip(orient, w2.locations, w2.cross_flags, ctx_key), key=hash))
                else:
                    key = tuple(sorted(zip(orient, w2.locations, ctx_key), key=hash))
                if key in seen:
                    continue
                parents.append((idx, m))
                seen[key] = len(parents) - 1
                nxt.append((w2, contexts2, ctx_key, len(parents) - 1))
            if explored + len(nxt) > state_budget:
                return CheckResult(CheckVerdict.BUDGET_EXCEEDED, explored, depth, leaf_outcomes=leaves)
        frontier = nxt
        if not frontier:
            return CheckResult(CheckVerdict.ALL_SCHEDULES_GATHER, explored, depth, leaf_outcomes=leaves)
    # something still running after the bound
    idx = frontier[0][-1]
    leaves[ResultKind.TIMED_OUT] = len(frontier)
    return CheckResult(
        CheckVerdict.COUNTEREXAMPLE,
        explored,
        max_rounds,
        _schedule(parents, idx),
        Verdict(ResultKind.TIMED_OUT, max_rounds),
        leaves,
    )


def _schedule(parents: list[tuple[int, Optional[int]]], idx: int) -> list[Optional[int]]:
    out = []
    while idx > 0:
        idx, m = parents[idx]
        out.append(m)
    out.reverse()
    return out
