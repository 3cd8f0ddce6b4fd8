"""Per-agent building blocks shared by all protocols.

Agents think in private directions: ``RIGHT = +1`` and ``LEFT = -1``.  An agent's
``orientation`` is the global direction its private right points to; protocols never
read it except to translate intents and buffer directions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from operator import attrgetter
from typing import Callable, NamedTuple, Optional, Sequence

from .config import ElectionKind, ElectionResult
from .ring import Direction, Observation

RIGHT = 1
LEFT = -1


def to_global(private: Optional[int], orientation: Direction) -> Optional[Direction]:
    if private is None:
        return None
    return Direction(private * int(orientation))


@dataclass(slots=True)
class AgentVariables:
    ttime: int = 0
    total_agents: Optional[int] = None
    r_ms: int = 0
    btime: int = 0
    btime_prev: int = 0
    etime: int = 0
    esteps: int = 0
    agents: int = 1
    bperiods: int = 0
    stall: int = 0  # rounds without a traversal since the last reset; BPeriods = stall // period
    homebase_visits: int = 0
    known_n: Optional[int] = None

    def copy(self) -> "AgentVariables":
        return AgentVariables(*_var_values(self))


_VAR_FIELDS = tuple(AgentVariables.__dataclass_fields__)
_var_values = attrgetter(*_VAR_FIELDS)


class PredicateKind(str, Enum):
    MEETING = "meeting"
    MEETING_SAME_DIR = "meetingSameDir"
    MEETING_OPPOSITE_DIR = "meetingOppositeDir"
    CROSSED = "crossed"
    SEE_ELECTED = "seeElected"


class Events(NamedTuple):
    meeting: bool = False
    same_dir: bool = False
    opposite_dir: bool = False
    crossed: bool = False

    def consumed(self) -> "Events":
        return Events()


def observe_events(
    obs: Observation,
    previous_agents: Optional[int],
    direction: Optional[Direction],
) -> Events:
    """Event predicates for one round.

    ``previous_agents`` is the count seen in the previous round (``None`` on the very
    first round).  After a traversal the comparison baseline is the group that crossed
    together, so walking into an occupied node is a meeting while a group moving in
    lockstep is not.
    """
    if previous_agents is None:
        meeting = False
    else:
        baseline = obs.co_travellers if obs.moved else previous_agents
        meeting = obs.total > baseline
    same = opposite = False
    if direction is not None:
        same = obs.arrived(direction) > 0
        opposite = obs.arrived(direction.opposite()) > 0
    return Events(meeting, same, opposite, obs.crossed)


def see_elected(position: int, target: Optional[ElectionResult], n: int) -> bool:
    if target is None or target.kind is ElectionKind.NONE:
        raise ValueError("seeElected needs an elected node or edge")
    if target.kind is ElectionKind.NODE:
        return position == target.target
    return position in (target.target, (target.target + 1) % n)


def eval_predicate(
    kind: PredicateKind,
    obs: Observation,
    vars: AgentVariables,
    direction: Optional[Direction] = None,
    elected_target: Optional[ElectionResult] = None,
    position: Optional[int] = None,
    previous_agents: Optional[int] = None,
    n: Optional[int] = None,
) -> bool:
    """Evaluate one event predicate.

    ``previous_agents`` defaults to ``vars.agents`` (the count stored last round).
    ``position`` and ``elected_target`` must share a frame; position defaults to the
    observer's global node.  ``n`` defaults to ``vars.known_n``.
    """
    if kind is PredicateKind.SEE_ELECTED:
        pos = obs.own_location.node if position is None else position
        size = n if n is not None else vars.known_n
        if size is None:
            raise ValueError("seeElected needs the ring size")
        return see_elected(pos, elected_target, size)
    prev = vars.agents if previous_agents is None else previous_agents
    ev = observe_events(obs, prev, direction)
    return {
        PredicateKind.MEETING: ev.meeting,
        PredicateKind.MEETING_SAME_DIR: ev.same_dir,
        PredicateKind.MEETING_OPPOSITE_DIR: ev.opposite_dir,
        PredicateKind.CROSSED: ev.crossed,
    }[kind]


Guard = Callable[[AgentVariables, Events], bool]


@dataclass(frozen=True)
class ExploreSpec:
    """Direction to walk (private, or None to stay) and ordered (guard, target) pairs."""

    dir: Optional[int]
    guards: Sequence[tuple[Guard, str]] = ()


def explore_tick(spec: ExploreSpec, vars: AgentVariables, events: Events) -> tuple[Optional[int], Optional[str]]:
    """First satisfied guard wins; with none satisfied the agent walks ``spec.dir``."""
    for guard, target in spec.guards:
        if guard(vars, events):
            return None, target
    return spec.dir, None


def update_variables(
    vars: AgentVariables,
    obs: Observation,
    moved: bool,
    blocked: bool,
    changed_direction: bool = False,
    state_changed: bool = False,
    logic_period_elapsed: bool = False,
    met_same_dir: bool = False,
    period: Optional[int] = None,
) -> AgentVariables:
    """One round of bookkeeping; returns a new ``AgentVariables``.

    ``logic_period_elapsed`` is accepted for callers that track periods externally;
    when ``period`` is given BPeriods is derived from the stall counter instead.
    """
    v = vars.copy()
    v.ttime += 1
    v.agents = obs.total
    v.btime_prev = vars.btime
    if moved:
        v.btime = 0
        v.esteps += 1
        v.stall = 0
        v.bperiods = 0
    elif blocked:
        v.btime += 1
    if not moved:
        v.stall += 1
    v.etime += 1
    if obs.at_homebase and moved:
        v.homebase_visits += 1
    if changed_direction:
        v.btime = 0
        v.stall = 0
        v.bperiods = 0
    if state_changed or changed_direction:
        v.r_ms = 0
        v.etime = 0
        v.esteps = 0
    if met_same_dir:
        v.r_ms = v.ttime
        v.etime = 0
        v.esteps = 0
        v.btime = 0
        v.stall = 0
        v.bperiods = 0
    if period:
        v.bperiods = v.stall // period
    elif logic_period_elapsed and not moved:
        v.bperiods += 1
    return v


@dataclass(slots=True)
class RingMap:
    """What an agent has seen, indexed by private-right offset from its homebase."""

    lo: int = 0
    hi: int = 0
    homebases: set = field(default_factory=set)
    ports: dict = field(default_factory=dict)  # offset -> (left label, right label)

    def copy(self) -> "RingMap":
        return RingMap(self.lo, self.hi, set(self.homebases), dict(self.ports))

    def record(self, offset: int, obs: Observation, orientation: Direction) -> None:
        if offset < self.lo:
            self.lo = offset
        elif offset > self.hi:
            self.hi = offset
        if offset not in self.ports:
            ccw, cw = obs.port_labels
            self.ports[offset] = (ccw, cw) if orientation is Direction.CW else (cw, ccw)
            if obs.at_homebase:
                self.homebases.add(offset)

    def ring_size(self, known_n: Optional[int], known_k: Optional[int]) -> Optional[int]:
        """Ring size if the explored stretch already covers a full loop, else None."""
        if known_n is not None:
            return known_n if self.hi - self.lo + 1 >= known_n else None
        if known_k is not None:
            marks = sorted(self.homebases)
            if len(marks) > known_k:
                return marks[known_k] - marks[0]
        return None

    def frame(self, n: int) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
        """Homebases and (left, right) port labels by node ``offset mod n``."""
        hbs = tuple(sorted({o % n for o in self.homebases}))
        ports = [None] * n
        for o, pl in self.ports.items():
            ports[o % n] = pl
        return hbs, tuple(ports)
