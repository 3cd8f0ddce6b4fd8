"""Synchronous 1-interval-connected ring: topology, port buffers, movement and observations.

Node ``i`` is joined to ``i+1`` by edge ``i`` (indices mod ``n``).  Clockwise (CW)
is the direction of increasing node index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple, Optional, Sequence


class Direction(IntEnum):
    CW = 1
    CCW = -1

    def opposite(self) -> "Direction":
        return _OPPOSITE[self]


_OPPOSITE = {Direction.CW: Direction.CCW, Direction.CCW: Direction.CW}
# product of a private direction (+1/-1) and an orientation -> global direction
DIRECTION_OF = {1: Direction.CW, -1: Direction.CCW}


class LocKind(IntEnum):
    NODE = 0
    OUT = 1
    IN = 2


class Location(NamedTuple):
    """Where an agent sits inside a node.

    ``direction`` is the travel direction of the buffer occupant: ``IN(w, CW)`` holds
    agents that reached ``w`` moving clockwise, ``OUT(v, CW)`` agents waiting to leave
    ``v`` clockwise.
    """

    kind: LocKind
    node: int
    direction: Optional[Direction] = None

    @classmethod
    def at_node(cls, node: int) -> "Location":
        return cls(LocKind.NODE, node, None)

    @classmethod
    def out_buffer(cls, node: int, direction: Direction) -> "Location":
        return cls(LocKind.OUT, node, direction)

    @classmethod
    def in_buffer(cls, node: int, direction: Direction) -> "Location":
        return cls(LocKind.IN, node, direction)

    def __repr__(self) -> str:
        if self.kind is LocKind.NODE:
            return f"AtNode({self.node})"
        name = "OutBuffer" if self.kind is LocKind.OUT else "InBuffer"
        return f"{name}({self.node},{self.direction.name})"


def edge_between(node: int, direction: Direction, n: int) -> int:
    """Edge crossed when leaving ``node`` in ``direction``."""
    return node if direction is Direction.CW else (node - 1) % n


def neighbour(node: int, direction: Direction, n: int) -> int:
    return (node + int(direction)) % n


def ring_distance(a: int, b: int, n: int) -> int:
    d = (a - b) % n
    return min(d, n - d)


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class RingTopology:
    n: int
    homebases: tuple[int, ...]
    port_labels: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.n < 3:
            raise TopologyError(f"ring needs at least 3 nodes, got n={self.n}")
        hb = tuple(sorted(self.homebases))
        if len(set(hb)) != len(hb):
            raise TopologyError(f"duplicate homebases: {self.homebases}")
        if len(hb) < 2 or len(hb) > self.n:
            raise TopologyError(f"need 2..n homebases, got {len(hb)}")
        if hb[0] < 0 or hb[-1] >= self.n:
            raise TopologyError(f"homebase index out of range for n={self.n}")
        object.__setattr__(self, "homebases", hb)
        labels = tuple(tuple(p) for p in self.port_labels) or ((0, 1),) * self.n
        if len(labels) != self.n:
            raise TopologyError("port_labels must list one (ccw, cw) pair per node")
        for i, (a, b) in enumerate(labels):
            if a == b:
                raise TopologyError(f"node {i} has two ports labelled {a}")
        object.__setattr__(self, "port_labels", labels)

    @property
    def k(self) -> int:
        return len(self.homebases)

    def is_homebase(self, node: int) -> bool:
        return node in self._hb_set

    @property
    def _hb_set(self) -> frozenset[int]:
        s = self.__dict__.get("_hbs")
        if s is None:
            s = frozenset(self.homebases)
            object.__setattr__(self, "_hbs", s)
        return s

    def rotated(self, shift: int) -> "RingTopology":
        n = self.n
        labels = [None] * n
        for i, pl in enumerate(self.port_labels):
            labels[(i + shift) % n] = pl
        return RingTopology(n, tuple((h + shift) % n for h in self.homebases), tuple(labels))

    def reflected(self) -> "RingTopology":
        """Mirror image ``i -> -i``; each node's CCW and CW ports swap roles."""
        n = self.n
        labels = [None] * n
        for i, (ccw, cw) in enumerate(self.port_labels):
            labels[(-i) % n] = (cw, ccw)
        return RingTopology(n, tuple((-h) % n for h in self.homebases), tuple(labels))


class Observation(NamedTuple):
    """What one agent sees at the start of a round.

    ``counts`` holds the number of agents (observer included) at the node proper, in
    OUT(CW), OUT(CCW), IN(CW) and IN(CCW).  ``arrived_cw``/``arrived_ccw`` count agents
    newly co-located with the observer whose buffer shows them travelling in that
    direction; ``arrived_idle`` counts new agents sitting at the node.
    """

    at_homebase: bool
    counts: tuple[int, int, int, int, int]
    own_location: Location
    port_labels: tuple[int, int]
    crossed: bool
    arrived_cw: int
    arrived_ccw: int
    arrived_idle: int

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def moved(self) -> bool:
        return self.own_location.kind is LocKind.IN

    @property
    def blocked(self) -> bool:
        return self.own_location.kind is LocKind.OUT

    @property
    def co_travellers(self) -> int:
        """Agents (observer included) that crossed the same edge with the observer."""
        loc = self.own_location
        if loc.kind is not LocKind.IN:
            return 1
        return self.counts[3] if loc.direction is Direction.CW else self.counts[4]

    def arrived(self, direction: Direction) -> int:
        return self.arrived_cw if direction is Direction.CW else self.arrived_ccw


_SLOT = {
    (LocKind.NODE, None): 0,
    (LocKind.OUT, Direction.CW): 1,
    (LocKind.OUT, Direction.CCW): 2,
    (LocKind.IN, Direction.CW): 3,
    (LocKind.IN, Direction.CCW): 4,
}


@dataclass(frozen=True)
class WorldState:
    topology: RingTopology
    locations: tuple[Location, ...]
    round: int = 0
    missing: Optional[int] = None
    cross_flags: tuple[bool, ...] = ()
    _buckets: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        if not self.cross_flags:
            object.__setattr__(self, "cross_flags", (False,) * len(self.locations))

    @classmethod
    def initial(cls, topology: RingTopology) -> "WorldState":
        return cls(topology, tuple(Location.at_node(h) for h in topology.homebases))

    @property
    def k(self) -> int:
        return len(self.locations)

    def key(self) -> tuple:
        return (self.locations, self.cross_flags)

    def node_counts(self, node: int) -> list[int]:
        buckets = self._buckets
        if buckets is None:
            buckets = {}
            for loc in self.locations:
                c = buckets.get(loc.node)
                if c is None:
                    c = buckets[loc.node] = [0, 0, 0, 0, 0]
                c[_SLOT[loc.kind, loc.direction]] += 1
            object.__setattr__(self, "_buckets", buckets)
        return buckets.get(node) or [0, 0, 0, 0, 0]

    def occupied_nodes(self) -> set[int]:
        return {loc.node for loc in self.locations}


def _move_table(topology: RingTopology) -> dict:
    """(node, intent) -> (edge, blocked location, arrival location, direction bit), cached."""
    table = topology.__dict__.get("_moves")
    if table is None:
        n = topology.n
        table = {}
        for v in range(n):
            table[v, None] = (None, Location.at_node(v), None, 0)
            for d in (Direction.CW, Direction.CCW):
                e = v if d is Direction.CW else (v - 1) % n
                table[v, d] = (e, Location.out_buffer(v, d), Location.in_buffer((v + d) % n, d), 1 if d is Direction.CW else 2)
        object.__setattr__(topology, "_moves", table)
    return table


def apply_round(
    state: WorldState,
    missing: Optional[int],
    intents: Sequence[Optional[Direction]],
) -> WorldState:
    """Resolve one round of movement with edge ``missing`` absent."""
    topo = state.topology
    n = topo.n
    if len(intents) != len(state.locations):
        raise ValueError(f"expected {len(state.locations)} intents, got {len(intents)}")
    if missing is not None and not 0 <= missing < n:
        raise ValueError(f"invalid edge id {missing} for n={n}")
    table = _move_table(topo)
    new_locs = []
    used: dict[int, int] = {}  # edge -> bitmask of directions traversed (1 = CW, 2 = CCW)
    crossed_edge: list[Optional[int]] = []
    for loc, intent in zip(state.locations, intents):
        e, stay, arrive, bit = table[loc.node, intent]
        if e is None or e == missing:
            new_locs.append(stay)
            crossed_edge.append(None)
        else:
            new_locs.append(arrive)
            used[e] = used.get(e, 0) | bit
            crossed_edge.append(e)
    if len(used) and any(b == 3 for b in used.values()):
        flags = tuple(e is not None and used[e] == 3 for e in crossed_edge)
    else:
        flags = (False,) * len(crossed_edge)
    w = object.__new__(WorldState)
    w.__dict__.update(
        topology=topo, locations=tuple(new_locs), round=state.round + 1, missing=missing, cross_flags=flags, _buckets=None
    )
    return w


def observe(state: WorldState, agent: int, cross_detection: bool = True) -> Observation:
    loc = state.locations[agent]
    topo = state.topology
    c = state.node_counts(loc.node)
    if loc.kind is LocKind.IN:
        arrived_cw = c[1] + (0 if loc.direction is Direction.CW else c[3])
        arrived_ccw = c[2] + (0 if loc.direction is Direction.CCW else c[4])
        idle = c[0]
    else:
        # everything in an incoming buffer arrived this round
        arrived_cw, arrived_ccw, idle = c[3], c[4], 0
    return Observation(
        topo.is_homebase(loc.node),
        tuple(c),
        loc,
        topo.port_labels[loc.node],
        bool(cross_detection and state.cross_flags[agent]),
        arrived_cw,
        arrived_ccw,
        idle,
    )
