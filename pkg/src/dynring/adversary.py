"""Edge schedulers.  Each round the adversary sees the world and every agent's intent,
then removes at most one edge.
"""
from __future__ import annotations

import random
from typing import Optional, Sequence

from .config import ConfigKind, classify
from .ring import Direction, LocKind, RingTopology, WorldState, apply_round


class AdversaryStrategy:
    """Base class; subclasses override :meth:`decide`."""

    name = "base"

    def decide(self, state: WorldState, intents: Sequence[Optional[Direction]], round_: int) -> Optional[int]:
        raise NotImplementedError

    def describe(self) -> str:
        return self.name


def attempted_edges(state: WorldState, intents: Sequence[Optional[Direction]]) -> list[int]:
    """Edges some agent tries to traverse this round, ascending."""
    n = state.topology.n
    edges = set()
    for loc, d in zip(state.locations, intents):
        if d is not None:
            edges.add(loc.node if d is Direction.CW else (loc.node - 1) % n)
    return sorted(edges)


class NoRemoval(AdversaryStrategy):
    name = "none"

    def decide(self, state, intents, round_):
        return None


class FixedScript(AdversaryStrategy):
    """Replays ``script[r]`` at round ``r``; rounds past the end have no missing edge."""

    name = "script"

    def __init__(self, script: Sequence[Optional[int]]):
        self.script = list(script)

    def decide(self, state, intents, round_):
        if round_ < len(self.script):
            return self.script[round_]
        return None

    def describe(self) -> str:
        return f"script({len(self.script)} rounds)"


class RandomEdge(AdversaryStrategy):
    """Removes a uniformly chosen edge with probability ``p`` each round.

    With ``targeted`` the edge is drawn among edges agents are trying to cross, which
    makes removals bite far more often.
    """

    name = "random"

    def __init__(self, seed: int = 0, p: float = 0.5, targeted: bool = False):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"removal probability must be in [0, 1], got {p}")
        self.seed, self.p, self.targeted = seed, p, targeted
        self._rng = random.Random(seed)

    def decide(self, state, intents, round_):
        rng = self._rng
        if rng.random() >= self.p:
            return None
        if self.targeted:
            edges = attempted_edges(state, intents)
            return rng.choice(edges) if edges else None
        return rng.randrange(state.topology.n)

    def describe(self) -> str:
        return f"random(seed={self.seed}, p={self.p}{', targeted' if self.targeted else ''})"


class PersistentEdge(AdversaryStrategy):
    name = "persistent"

    def __init__(self, edge: int):
        self.edge = edge

    def decide(self, state, intents, round_):
        if not 0 <= self.edge < state.topology.n:
            raise ValueError(f"invalid edge id {self.edge} for n={state.topology.n}")
        return self.edge

    def describe(self) -> str:
        return f"persistent({self.edge})"


class GreedySeparator(AdversaryStrategy):
    """Removes the edge that leaves the most distinct occupied nodes after the round."""

    name = "greedy"

    def decide(self, state, intents, round_):
        best, best_score = None, -1
        for e in attempted_edges(state, intents):
            score = len(apply_round(state, e, intents).occupied_nodes())
            if score > best_score:
                best, best_score = e, score
        return best


class PairBlocker(AdversaryStrategy):
    """Keeps agents ``a`` and ``b`` from ever sharing a node.

    If the round would bring them together, the edge of a moving one is removed (the
    lower-indexed mover's edge when both move).
    """

    name = "pair"

    def __init__(self, a: int = 0, b: int = 1):
        if a == b:
            raise ValueError("PairBlocker needs two distinct agents")
        self.a, self.b = a, b

    def decide(self, state, intents, round_):
        nxt = apply_round(state, None, intents)
        if nxt.locations[self.a].node != nxt.locations[self.b].node:
            return None
        n = state.topology.n
        for i in sorted((self.a, self.b)):
            d = intents[i]
            if d is not None:
                v = state.locations[i].node
                return v if d is Direction.CW else (v - 1) % n
        return None

    def describe(self) -> str:
        return f"pair({self.a},{self.b})"


class SymmetricBlocker(AdversaryStrategy):
    """Illustrative mirror blocking for configurations with an edge-edge axis.

    Whenever an agent tries to cross one of the two axis edges, that edge is removed
    (the lower one if both are attempted).  This preserves the mirror symmetry of runs
    whose agents have mirrored orientations; it is a demonstration, not a universal
    impossibility argument.
    """

    name = "symmetric"

    def __init__(self, topology: RingTopology):
        cls = classify(topology)
        if cls.kind is not ConfigKind.EDGE_EDGE:
            raise ValueError(f"symmetric blocker needs an edge-edge configuration, got {cls}")
        self.axis = cls.axis_edges

    def decide(self, state, intents, round_):
        attempted = set(attempted_edges(state, intents))
        for e in self.axis:
            if e in attempted:
                return e
        return None

    def describe(self) -> str:
        return f"symmetric(axis edges {self.axis})"


def make_strategy(spec: str, topology: RingTopology, seed: int = 0) -> AdversaryStrategy:
    """Build a strategy from a short text form.

    ``none``, ``random[:p]``, ``targeted[:p]``, ``persistent:e``, ``greedy``,
    ``pair[:a,b]``, ``symmetric`` and ``script:e0,e1,-,e3`` (``-`` = no removal).
    """
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name in ("none", "noremoval"):
        return NoRemoval()
    if name in ("random", "targeted"):
        return RandomEdge(seed, float(arg) if arg else 0.5, targeted=name == "targeted")
    if name == "persistent":
        if not arg:
            raise ValueError("persistent needs an edge, e.g. persistent:2")
        return PersistentEdge(int(arg))
    if name == "greedy":
        return GreedySeparator()
    if name == "pair":
        a, b = (int(x) for x in arg.split(",")) if arg else (0, 1)
        return PairBlocker(a, b)
    if name == "symmetric":
        return SymmetricBlocker(topology)
    if name == "script":
        return FixedScript([None if x.strip() in ("-", "") else int(x) for x in arg.split(",")] if arg else [])
    raise ValueError(f"unknown adversary {spec!r}")


def blocked_agents(state: WorldState) -> list[int]:
    return [i for i, loc in enumerate(state.locations) if loc.kind is LocKind.OUT]
