"""Homebase configurations: inter-distance sequences, symmetry class and leader election.

Every function here works on ``(n, homebases)`` in a frame where "clockwise" means
increasing node index.  Agents reuse the same code in their private frames.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Union

from .ring import Direction, RingTopology


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InterDistanceView:
    n: int
    homebases: tuple[int, ...]  # sorted, clockwise order h_0..h_{k-1}
    distances: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.distances)

    def cw(self, j: int) -> tuple[int, ...]:
        d, k = self.distances, self.k
        return tuple(d[(j + t) % k] for t in range(k))

    def ccw(self, j: int) -> tuple[int, ...]:
        d, k = self.distances, self.k
        return tuple(d[(j - 1 - t) % k] for t in range(k))

    @property
    def rotations_cw(self) -> list[tuple[int, ...]]:
        return [self.cw(j) for j in range(self.k)]

    @property
    def rotations_ccw(self) -> list[tuple[int, ...]]:
        return [self.ccw(j) for j in range(self.k)]


def compute_inter_distances(topology: Union[RingTopology, tuple[int, Iterable[int]]]) -> InterDistanceView:
    n, hbs = _unpack(topology)
    if len(hbs) < 2:
        raise ConfigError("need at least two homebases")
    dist = tuple((hbs[(i + 1) % len(hbs)] - hbs[i]) % n or n for i in range(len(hbs)))
    return InterDistanceView(n, hbs, dist)


def _unpack(topology) -> tuple[int, tuple[int, ...]]:
    if isinstance(topology, RingTopology):
        return topology.n, topology.homebases
    n, hbs = topology
    return n, tuple(sorted(set(h % n for h in hbs)))


def delta_min(view: InterDistanceView) -> tuple[tuple[int, ...], list[tuple[Direction, int]]]:
    """Lexicographic minimum over all rotations in both directions and where it occurs."""
    best = min(min(view.rotations_cw), min(view.rotations_ccw))
    where = [(Direction.CW, j) for j in range(view.k) if view.cw(j) == best]
    where += [(Direction.CCW, j) for j in range(view.k) if view.ccw(j) == best]
    return best, where


class ConfigKind(str, Enum):
    PERIODIC = "periodic"
    EDGE_EDGE = "edge-edge"
    NODE_SYMMETRIC = "node-symmetric"
    ASYMMETRIC = "asymmetric"


# An axis point is ("node", v) or ("edge", e).
AxisPoint = tuple[str, int]


@dataclass(frozen=True)
class ConfigClass:
    kind: ConfigKind
    period: Optional[int] = None
    axis: tuple[AxisPoint, ...] = ()

    @property
    def axis_nodes(self) -> tuple[int, ...]:
        return tuple(x for t, x in self.axis if t == "node")

    @property
    def axis_edges(self) -> tuple[int, ...]:
        return tuple(x for t, x in self.axis if t == "edge")

    def __str__(self) -> str:
        if self.kind is ConfigKind.PERIODIC:
            return f"Periodic(p={self.period})"
        if self.kind is ConfigKind.ASYMMETRIC:
            return "Asymmetric"
        name = "EdgeEdge" if self.kind is ConfigKind.EDGE_EDGE else "NodeSymmetric"
        return f"{name}({', '.join(f'{t} {x}' for t, x in self.axis)})"


def minimal_period(distances: tuple[int, ...]) -> int:
    k = len(distances)
    for p in range(1, k + 1):
        if k % p == 0 and all(distances[i] == distances[(i + p) % k] for i in range(k)):
            return p
    return k  # unreachable


def _axis_point(doubled: int) -> AxisPoint:
    return ("node", doubled // 2) if doubled % 2 == 0 else ("edge", (doubled - 1) // 2)


@dataclass(frozen=True)
class _Arc:
    start: int  # homebase the arc leaves clockwise
    length: int
    seq: tuple[int, ...]

    def centre(self, n: int) -> AxisPoint:
        return _axis_point((2 * self.start + self.length) % (2 * n))


def _mirror_pair(view: InterDistanceView) -> Optional[tuple[int, int]]:
    """Indices (i, j) with delta+i == delta-j == delta_min, or None if C is asymmetric."""
    _, where = delta_min(view)
    plus = [j for d, j in where if d is Direction.CW]
    minus = [j for d, j in where if d is Direction.CCW]
    if len(plus) > 1 or len(minus) > 1:
        raise ConfigError(f"minimal sequence repeats in a non-periodic configuration: {view.distances}")
    if plus and minus:
        return plus[0], minus[0]
    return None


def _arcs(view: InterDistanceView, i: int, j: int) -> tuple[_Arc, _Arc]:
    n, k, hb, d = view.n, view.k, view.homebases, view.distances
    span = (j - i) % k
    first = _Arc(hb[i], (hb[j] - hb[i]) % n, tuple(d[(i + t) % k] for t in range(span)))
    second = _Arc(hb[j], n - first.length, tuple(d[(j + t) % k] for t in range(k - span)))
    return first, second


def classify(topology) -> ConfigClass:
    view = compute_inter_distances(topology)
    p = minimal_period(view.distances)
    if p < view.k:
        return ConfigClass(ConfigKind.PERIODIC, period=p)
    pair = _mirror_pair(view)
    if pair is None:
        return ConfigClass(ConfigKind.ASYMMETRIC)
    i, j = pair
    s = view.homebases[i] + view.homebases[j]
    n = view.n
    axis = tuple(sorted({_axis_point(s % (2 * n)), _axis_point((s + n) % (2 * n))}, key=lambda a: (a[0] != "node", a[1])))
    if all(t == "edge" for t, _ in axis):
        return ConfigClass(ConfigKind.EDGE_EDGE, axis=axis)
    return ConfigClass(ConfigKind.NODE_SYMMETRIC, axis=axis)


class ElectionKind(str, Enum):
    NODE = "node"
    EDGE = "edge"
    NONE = "none"


@dataclass(frozen=True)
class ElectionResult:
    kind: ElectionKind
    target: Optional[int] = None
    reason: Optional[str] = None

    @classmethod
    def node(cls, v: int) -> "ElectionResult":
        return cls(ElectionKind.NODE, v)

    @classmethod
    def edge(cls, e: int) -> "ElectionResult":
        return cls(ElectionKind.EDGE, e)

    @classmethod
    def none(cls, reason: str) -> "ElectionResult":
        return cls(ElectionKind.NONE, None, reason)

    def __str__(self) -> str:
        if self.kind is ElectionKind.NODE:
            return f"LeaderNode({self.target})"
        if self.kind is ElectionKind.EDGE:
            return f"LeaderEdge({self.target})"
        return f"NoLeader({self.reason})"


def _pick_arc(arcs: Iterable[_Arc]) -> _Arc:
    arcs = sorted(arcs, key=lambda a: (a.length, a.seq))
    if len(arcs) > 1 and (arcs[0].length, arcs[0].seq) == (arcs[1].length, arcs[1].seq):
        raise ConfigError("arcs of a double-palindrome are indistinguishable")
    return arcs[0]


def elect(topology, chirality: bool = False) -> ElectionResult:
    view = compute_inter_distances(topology)
    n = view.n
    if minimal_period(view.distances) < view.k:
        return ElectionResult.none("periodic")
    pair = _mirror_pair(view)
    if pair is None:
        _, where = delta_min(view)
        (_, j), = where
        return ElectionResult.node(view.homebases[j])
    i, j = pair
    arcs = _arcs(view, i, j)
    even = [a for a in arcs if a.length % 2 == 0]
    if even:
        return ElectionResult.node(_pick_arc(even).centre(n)[1])
    leader_edge = _pick_arc(arcs).centre(n)[1]
    if not chirality:
        return ElectionResult.edge(leader_edge)
    start = view.homebases[i]
    first = min((leader_edge, (leader_edge + 1) % n), key=lambda x: (x - start) % n)
    return ElectionResult.node(first)


def is_unsolvable(cls: ConfigClass, include_edge_edge: bool) -> bool:
    if cls.kind is ConfigKind.PERIODIC:
        return True
    return include_edge_edge and cls.kind is ConfigKind.EDGE_EDGE


def agreed_clockwise(n: int, homebases: Iterable[int], port_labels) -> Direction:
    """Common orientation for agents lacking chirality, in the caller's frame.

    Asymmetric configurations use the direction of the unique minimal sequence; a
    symmetry axis through a node uses the smaller-labelled port of the elected node.
    ``port_labels[v]`` is the (ccw, cw) label pair of node ``v`` in this frame.
    """
    view = compute_inter_distances((n, homebases))
    cls = classify((n, homebases))
    if cls.kind is ConfigKind.ASYMMETRIC:
        _, where = delta_min(view)
        (direction, _), = where
        return direction
    if cls.kind is ConfigKind.NODE_SYMMETRIC:
        leader = elect((n, homebases)).target
        ccw_label, cw_label = port_labels[leader]
        return Direction.CCW if ccw_label < cw_label else Direction.CW
    raise ConfigError(f"no common orientation derivable for {cls}")
