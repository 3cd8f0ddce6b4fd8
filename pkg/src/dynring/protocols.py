"""The four gathering protocols as explicit per-agent state machines.

Every protocol runs a first phase in which agents walk around the ring, learn it and
possibly gather, followed by a second phase that drives all survivors towards an elected
node or edge.  A tick consumes one observation and returns the intent for the round.

Within a tick, transitions chain: the target state's guards are evaluated in the same
round.  One-shot events (meeting, crossed, ...) are only visible to the first state of
the chain; counters and positions are visible to all of them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from operator import attrgetter
from typing import Optional

from .agent import LEFT, RIGHT, AgentVariables, Events, RingMap, observe_events, see_elected
from .config import (
    ConfigKind,
    ElectionKind,
    ElectionResult,
    agreed_clockwise,
    classify,
    elect,
)
from .logic_ring import LogicRingLabels
from .ring import DIRECTION_OF, Direction, Observation


class Protocol(str, Enum):
    CROSS_NO_CHIR = "CrossNoChir"
    CROSS_CHIR = "CrossChir"
    NO_CROSS_CHIR = "NoCrossChir"
    NO_CROSS_NO_CHIR = "NoCrossNoChir"

    @property
    def cross_detection(self) -> bool:
        return self in (Protocol.CROSS_NO_CHIR, Protocol.CROSS_CHIR)

    @property
    def chirality(self) -> bool:
        return self in (Protocol.CROSS_CHIR, Protocol.NO_CROSS_CHIR)


class ProtocolError(ValueError):
    """A protocol was configured with capabilities or knowledge it cannot work with."""


@dataclass(frozen=True)
class ProtocolId:
    protocol: Protocol
    knows_n: bool = True
    knows_k: bool = False
    # BPeriods termination threshold; None means 4n+8
    bperiods_threshold: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        if not (self.knows_n or self.knows_k):
            raise ProtocolError("agents must know n or k")
        if self.protocol in (Protocol.CROSS_NO_CHIR, Protocol.NO_CROSS_NO_CHIR) and not self.knows_n:
            raise ProtocolError(f"{self.protocol.value} needs knowledge of n")

    @property
    def cross_detection(self) -> bool:
        return self.protocol.cross_detection

    @property
    def chirality(self) -> bool:
        return self.protocol.chirality

    @property
    def uses_logic_ring(self) -> bool:
        return not self.protocol.cross_detection

    def threshold(self, n: int) -> int:
        return 4 * n + 8 if self.bperiods_threshold is None else self.bperiods_threshold

    def __str__(self) -> str:
        knows = "+".join(x for x, on in (("n", self.knows_n), ("k", self.knows_k)) if on)
        return f"{self.protocol.value}[{knows}]"


class State(str, Enum):
    INIT = "Init"
    SWITCH_DIR = "SwitchDir"
    KEEP_DIR = "KeepDir"
    SYNC_L = "SyncL"
    SYNC_R = "SyncR"
    PHASE2_ENTRY = "Phase2Entry"
    APPROACH = "Phase2"
    REACHED = "ReachedElected"
    REACHING = "ReachingElected"
    JOINING = "Joining"
    WAITING = "Waiting"
    REVERSE_DIR = "ReverseDir"
    TERM = "Term"


PHASE2_STATES = frozenset({State.APPROACH, State.REACHED, State.REACHING, State.JOINING, State.WAITING})


class Outcome(str, Enum):
    GATHERED = "Gathered"
    UNSOLVABLE = "Unsolvable"


class ProtocolViolation(RuntimeError):
    pass


_MAX_CHAIN = 8


@dataclass(slots=True)
class AgentContext:
    protocol: ProtocolId
    orientation: Direction  # global direction of this agent's private right
    n: Optional[int] = None  # given or learned ring size
    k: Optional[int] = None  # given number of agents
    state: State = State.INIT
    dir: Optional[int] = LEFT  # private direction of the current Explore
    vars: AgentVariables = field(default_factory=AgentVariables)
    offset: int = 0  # net private-right steps from the homebase
    map: Optional[RingMap] = field(default_factory=RingMap)  # dropped once the ring is known
    homebases: Optional[tuple[int, ...]] = None  # learned, private frame
    ports: Optional[tuple] = None
    started: bool = False
    last_intent: Optional[int] = None
    exploring: bool = False  # ReachedElected waits for round 3n before moving
    declared: Optional[Outcome] = None
    violation: Optional[str] = None
    # phase 2: frame position = sign * offset mod n; "clockwise" = frame +1
    sign: int = 1
    target: Optional[ElectionResult] = None
    labels: Optional[LogicRingLabels] = None

    @classmethod
    def create(
        cls,
        protocol: ProtocolId,
        orientation: Direction = Direction.CW,
        n: Optional[int] = None,
        k: Optional[int] = None,
    ) -> "AgentContext":
        if protocol.knows_n and n is None:
            raise ProtocolError("protocol knows n but no n was given")
        if protocol.knows_k and k is None:
            raise ProtocolError("protocol knows k but no k was given")
        if protocol.chirality and orientation is not Direction.CW:
            raise ProtocolError("with chirality every agent's right is clockwise")
        ctx = cls(protocol, Direction(orientation), n if protocol.knows_n else None, k if protocol.knows_k else None)
        ctx.vars.known_n = ctx.n
        if protocol.knows_k:
            ctx.vars.total_agents = k
        ctx.dir = _initial_dir(protocol)
        return ctx

    @property
    def terminated(self) -> bool:
        return self.state is State.TERM

    @property
    def knows_ring(self) -> bool:
        return self.homebases is not None

    def copy(self) -> "AgentContext":
        """Copy that can be mutated without touching ``self`` (the map is copied on write)."""
        c = AgentContext(*_ctx_values(self))
        c.vars = self.vars.copy()
        return c

    def position(self) -> int:
        """Node index in the current frame (private until chirality is agreed)."""
        return (self.sign * self.offset) % self.n

    def key(self) -> tuple:
        """Hashable summary that determines all future behaviour (for state deduplication)."""
        v = self.vars
        n = self.n or 0
        if self.map is None:
            where = (self.offset % n,)
        else:
            where = (self.offset, self.map.lo, self.map.hi)
        if self.state in (State.INIT, State.SWITCH_DIR, State.KEEP_DIR):
            rms = v.r_ms < (3 * n if self.state is State.INIT else 9 * n) if n else v.r_ms
        else:
            rms = 0
        cap = 2 * n + 3 if n else 1 << 30
        stall = v.stall if self.labels is not None else 0
        return (
            self.state,
            self.dir,
            self.declared,
            self.last_intent,
            self.exploring,
            self.started,
            v.ttime,
            v.total_agents,
            v.agents,
            rms,
            min(v.btime, cap),
            min(v.btime_prev, cap),
            min(v.etime, cap),
            min(v.esteps, n + 1 if n else 1 << 30),
            stall,
            where,
        )


_CTX_FIELDS = tuple(AgentContext.__dataclass_fields__)
_ctx_values = attrgetter(*_CTX_FIELDS)


def _initial_dir(protocol: ProtocolId) -> int:
    if protocol.protocol is Protocol.CROSS_CHIR or protocol.protocol is Protocol.NO_CROSS_CHIR:
        return RIGHT if protocol.knows_n else LEFT
    return LEFT


# ---------------------------------------------------------------------------
# round bookkeeping


def _begin_round(c: AgentContext, obs: Observation) -> Events:
    v = c.vars
    if not c.started:
        c.started = True
        if c.map is not None:
            c.map = c.map.copy()
            c.map.record(0, obs, c.orientation)
        v.agents = obs.total
        _learn(c)
        return Events()
    moved, blocked = obs.moved, obs.blocked
    v.ttime += 1
    v.etime += 1
    v.btime_prev = v.btime
    if moved:
        c.offset += c.last_intent
        v.esteps += 1
        v.btime = 0
        v.stall = 0
        if obs.at_homebase:
            v.homebase_visits += 1
        if c.map is not None:
            c.map = c.map.copy()
            c.map.record(c.offset, obs, c.orientation)
    else:
        v.stall += 1
        if blocked:
            v.btime += 1
    gdir = None if c.dir is None else DIRECTION_OF[c.dir * c.orientation]
    ev = observe_events(obs, v.agents, gdir)
    v.agents = obs.total
    if ev.same_dir:
        v.r_ms = v.ttime
        v.etime = v.esteps = 0
        v.btime = 0
        v.stall = 0
    if c.labels is not None:
        v.bperiods = v.stall // c.labels.period
    if c.map is not None:
        _learn(c)
    return ev


def _learn(c: AgentContext) -> None:
    """Full-loop detection: once the walked stretch covers the ring, fix n, k and the map."""
    size = c.map.ring_size(c.n, c.k)
    if size is None:
        return
    c.n = size
    c.homebases, c.ports = c.map.frame(size)
    c.map = None
    c.vars.known_n = size
    if c.vars.total_agents is None:
        c.vars.total_agents = len(c.homebases)


def _goto(c: AgentContext, state: State, dir=..., keep_btime: bool = False) -> None:
    """Enter ``state`` with a fresh Explore call."""
    v = c.vars
    if dir is not ... and dir != c.dir:
        c.dir = dir
        keep_btime = False
    c.state = state
    v.r_ms = 0
    v.etime = v.esteps = 0
    if not keep_btime:
        v.btime = 0
        v.stall = 0
        v.bperiods = 0


def _term(c: AgentContext, outcome: Outcome = Outcome.GATHERED) -> None:
    c.state = State.TERM
    c.declared = outcome
    c.dir = None


def _violate(c: AgentContext, why: str) -> None:
    c.state = State.TERM
    c.violation = why
    c.dir = None


_AGAIN = object()


# ---------------------------------------------------------------------------
# phase 1


def _pred(c: AgentContext) -> bool:
    return c.vars.r_ms < 3 * c.n and c.vars.esteps < c.n


def _init_cross_no_chir(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if v.ttime == 6 * n:
        if _pred(c):
            _goto(c, State.KEEP_DIR, LEFT)
        else:
            _goto(c, State.SWITCH_DIR, RIGHT)
        return _AGAIN
    return c.dir


def _switch_dir(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if v.ttime == 12 * n:
        if v.r_ms < 9 * n and v.esteps < n and v.agents == v.total_agents and not ev.opposite_dir:
            _term(c)
            return None
        c.state = State.PHASE2_ENTRY
        return _AGAIN
    return c.dir


def _keep_dir(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if ev.crossed or ev.opposite_dir:
        _term(c)
        return None
    if v.ttime == 12 * n:
        if v.r_ms < 9 * n and v.esteps < n:
            _term(c)
            return None
        c.state = State.PHASE2_ENTRY
        return _AGAIN
    return c.dir


def _init_chir(c: AgentContext, ev: Events):
    v = c.vars
    if c.protocol.knows_n:
        if v.ttime == 6 * c.n:
            if _pred(c):
                _term(c)
                return None
            c.state = State.PHASE2_ENTRY
            return _AGAIN
        return c.dir
    if v.agents == c.k:
        _term(c)
        return None
    if c.n is not None and v.ttime >= 3 * c.n + 1:
        c.state = State.PHASE2_ENTRY
        return _AGAIN
    return c.dir


def _t0(n: int) -> int:
    return 3 * n * (n + 3)


def _init_no_chir(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if v.ttime >= _t0(n):
        _goto(c, State.SYNC_L, LEFT, keep_btime=True)
        return _AGAIN
    if v.btime >= 2 * n + 2 or (v.btime_prev >= n + 1 and ev.meeting):
        _term(c)
        return None
    return c.dir


def _sync_l(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    t1 = _t0(n) + 2 * n + 1
    if (v.ttime >= t1 and v.btime > n) or v.agents == v.total_agents:
        _term(c)
        return None
    if v.ttime >= t1:
        c.state = State.PHASE2_ENTRY
        return _AGAIN
    if 0 < v.btime <= n:
        _goto(c, State.SYNC_R, RIGHT)
        return _AGAIN
    return c.dir


def _sync_r(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if v.agents == v.total_agents:
        _term(c)
        return None
    if v.ttime >= _t0(n) + 2 * n + 1:
        c.state = State.PHASE2_ENTRY
        return _AGAIN
    if v.btime == 1:
        _goto(c, State.SYNC_L, LEFT)
        return _AGAIN
    return c.dir


# ---------------------------------------------------------------------------
# phase 2


def _phase2_entry(c: AgentContext, ev: Events):
    if not c.knows_ring:
        _violate(c, "entered the second phase without having seen the whole ring")
        return None
    n = c.n
    proto = c.protocol.protocol
    cls = classify((n, c.homebases))
    if cls.kind is ConfigKind.PERIODIC or (proto is Protocol.NO_CROSS_NO_CHIR and cls.kind is ConfigKind.EDGE_EDGE):
        _term(c, Outcome.UNSOLVABLE)
        return None
    hbs = c.homebases
    if proto is Protocol.NO_CROSS_NO_CHIR:
        cw = agreed_clockwise(n, hbs, c.ports)
        c.sign = 1 if cw is Direction.CW else -1
        hbs = tuple(sorted((c.sign * h) % n for h in hbs))
    chiral_frame = proto is not Protocol.CROSS_NO_CHIR
    c.target = elect((n, hbs), chirality=chiral_frame)
    if c.protocol.uses_logic_ring:
        c.labels = LogicRingLabels(n, c.target.target)
    v = c.vars
    total, agents = v.total_agents, v.agents
    c.vars = AgentVariables(total_agents=total, agents=agents, known_n=n)
    c.exploring = False
    frame_dir = _approach_dir(c.position(), c.target, n, tie=1 if chiral_frame else -1)
    _goto(c, State.APPROACH, frame_dir * c.sign)
    return _AGAIN


def _approach_dir(pos: int, target: ElectionResult, n: int, tie: int) -> int:
    """Frame direction of a shortest path from ``pos`` to the elected node or edge."""
    if target.kind is ElectionKind.NODE:
        plus, minus = (target.target - pos) % n, (pos - target.target) % n
    else:
        a, b = target.target, (target.target + 1) % n
        # standing on an endpoint: behave as if just arrived from outside the edge
        if pos == a:
            return 1
        if pos == b:
            return -1
        plus = min((a - pos) % n, (b - pos) % n)
        minus = min((pos - a) % n, (pos - b) % n)
    if plus < minus:
        return 1
    if minus < plus:
        return -1
    return tie


def _sees_elected(c: AgentContext) -> bool:
    return see_elected(c.position(), c.target, c.n)


def _approach(c: AgentContext, ev: Events):
    n = c.n
    if _sees_elected(c):
        if not c.protocol.uses_logic_ring:
            c.dir = -c.dir
        _goto(c, State.REACHED)
        return _AGAIN
    if c.vars.ttime >= 3 * n:
        if c.protocol.uses_logic_ring:
            _goto(c, State.REACHING, -1 * c.sign)
        else:
            _goto(c, State.REACHING)
        c.exploring = True
        return _AGAIN
    return c.dir


def _reverse(c: AgentContext):
    _goto(c, State.REACHED, -c.dir)
    c.exploring = True
    return _AGAIN


def _reached(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if not c.exploring:
        if v.ttime < 3 * n:
            return None
        c.exploring = True
        if c.protocol.uses_logic_ring:
            _goto(c, State.REACHED, c.sign)
        else:
            _goto(c, State.REACHED)
    if c.protocol.uses_logic_ring:
        return _gated(c)
    if v.agents == v.total_agents or v.btime == 2 * n:
        _term(c)
        return None
    if ev.crossed:
        _goto(c, State.JOINING, -c.dir)
        return _AGAIN
    return c.dir


def _joining(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if v.agents == v.total_agents or v.btime == 2 * n or ev.crossed:
        _term(c)
        return None
    if v.esteps == 1:
        return _reverse(c)
    return c.dir


def _reaching(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if c.protocol.uses_logic_ring:
        return _gated(c)
    if v.agents == v.total_agents or v.btime == 2 * n:
        _term(c)
        return None
    if ev.same_dir:
        _goto(c, State.REACHED)
        c.exploring = True
        return _AGAIN
    # a crossing takes precedence over reaching the leader: the crossed group turns
    # back to join, so this agent must stay put rather than reverse away from it
    if ev.crossed:
        _goto(c, State.WAITING)
        return _AGAIN
    if ev.opposite_dir or _sees_elected(c):
        return _reverse(c)
    return c.dir


def _waiting(c: AgentContext, ev: Events):
    v, n = c.vars, c.n
    if v.etime > 2 * n:
        _term(c)
        return None
    if ev.meeting:
        return _reverse(c)
    return None


def _gated(c: AgentContext):
    """Logic-ring Explore: walk ``dir`` only in rounds the edge's labels allow."""
    v, n = c.vars, c.n
    if v.bperiods >= c.protocol.threshold(n) or v.agents == v.total_agents:
        _term(c)
        return None
    frame_dir = c.dir * c.sign
    pos = c.position()
    edge = pos if frame_dir == 1 else (pos - 1) % n
    if c.labels.may_move(edge, DIRECTION_OF[frame_dir], v.ttime):
        return c.dir
    return None


_PHASE2 = {
    State.PHASE2_ENTRY: _phase2_entry,
    State.APPROACH: _approach,
    State.REACHED: _reached,
    State.REACHING: _reaching,
    State.JOINING: _joining,
    State.WAITING: _waiting,
}

_MACHINES = {
    Protocol.CROSS_NO_CHIR: {State.INIT: _init_cross_no_chir, State.SWITCH_DIR: _switch_dir, State.KEEP_DIR: _keep_dir, **_PHASE2},
    Protocol.CROSS_CHIR: {State.INIT: _init_chir, **_PHASE2},
    Protocol.NO_CROSS_CHIR: {State.INIT: _init_chir, **_PHASE2},
    Protocol.NO_CROSS_NO_CHIR: {State.INIT: _init_no_chir, State.SYNC_L: _sync_l, State.SYNC_R: _sync_r, **_PHASE2},
}


def tick(ctx: AgentContext, obs: Observation) -> tuple[Optional[Direction], AgentContext]:
    """Advance one agent by one round; ``ctx`` is left untouched."""
    if ctx.state is State.TERM:
        return None, ctx
    c = ctx.copy()
    if not c.protocol.cross_detection and obs.crossed:
        obs = obs._replace(crossed=False)
    ev = _begin_round(c, obs)
    machine = _MACHINES[c.protocol.protocol]
    for _ in range(_MAX_CHAIN):
        before = c.state
        out = machine[c.state](c, ev)
        if out is not _AGAIN:
            c.last_intent = out
            intent = None if out is None else DIRECTION_OF[out * c.orientation]
            return intent, c
        if c.state is State.TERM:
            break
        ev = ev.consumed()
    else:
        raise ProtocolViolation(f"transition loop from {before.value}")
    c.last_intent = None
    return None, c


def _require(ctx: AgentContext, protocol: Protocol) -> None:
    if ctx.protocol.protocol is not protocol:
        raise ProtocolError(f"context runs {ctx.protocol.protocol.value}, not {protocol.value}")


def tick_cross_no_chir(ctx: AgentContext, obs: Observation):
    _require(ctx, Protocol.CROSS_NO_CHIR)
    return tick(ctx, obs)


def tick_cross_chir(ctx: AgentContext, obs: Observation):
    _require(ctx, Protocol.CROSS_CHIR)
    return tick(ctx, obs)


def tick_no_cross_chir(ctx: AgentContext, obs: Observation):
    _require(ctx, Protocol.NO_CROSS_CHIR)
    return tick(ctx, obs)


def tick_no_cross_no_chir(ctx: AgentContext, obs: Observation):
    _require(ctx, Protocol.NO_CROSS_NO_CHIR)
    return tick(ctx, obs)


def round_bound(protocol: ProtocolId, n: int) -> int:
    """Hard upper bound on the rounds a correct run may take."""
    p = protocol.protocol
    if p is Protocol.CROSS_NO_CHIR:
        return 22 * n
    if p is Protocol.CROSS_CHIR:
        return 16 * n if protocol.knows_n else 13 * n + 1
    # 3n to reach the leader, up to n periods for two groups to close in, then the
    # stall threshold (plus one partial period)
    logic = LogicRingLabels(n)
    phase2 = 3 * n + (n + protocol.threshold(n) + 2) * logic.period
    if p is Protocol.NO_CROSS_CHIR:
        return (6 * n if protocol.knows_n else 3 * n + 1) + phase2
    return _t0(n) + 2 * n + 1 + phase2
