"""Running protocols against adversaries and judging the outcome."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .adversary import AdversaryStrategy, FixedScript
from .config import ConfigKind, classify
from .protocols import AgentContext, Outcome, ProtocolId, State, round_bound, tick
from .ring import Direction, RingTopology, WorldState, apply_round, edge_between, observe


TICK_CACHE_LIMIT = 1_000_000


class ConfigurationError(ValueError):
    pass


class ResultKind(str, Enum):
    GATHERED = "Gathered"
    DETECTED_UNSOLVABLE = "DetectedUnsolvable"
    TIMED_OUT = "TimedOut"
    PROTOCOL_VIOLATION = "ProtocolViolation"


@dataclass(frozen=True)
class Verdict:
    kind: ResultKind
    round: Optional[int] = None
    node: Optional[int] = None  # gathered at a single node
    edge: Optional[int] = None  # gathered across the endpoints of an edge
    description: str = ""

    def __str__(self) -> str:
        if self.kind is ResultKind.GATHERED:
            where = f"node {self.node}" if self.node is not None else f"edge {self.edge}"
            return f"Gathered(round {self.round}, {where})"
        if self.kind is ResultKind.DETECTED_UNSOLVABLE:
            return f"DetectedUnsolvable(round {self.round})"
        if self.kind is ResultKind.TIMED_OUT:
            return f"TimedOut({self.round})"
        return f"ProtocolViolation({self.description})"


@dataclass(frozen=True)
class AgentRecord:
    location: str
    state: str
    direction: Optional[str]
    Ttime: int
    Btime: int
    Esteps: int
    BPeriods: int
    crossed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class TraceRecord:
    round: int
    missingEdge: Optional[int]
    agents: tuple[AgentRecord, ...]

    def to_dict(self) -> dict:
        return {"round": self.round, "missingEdge": self.missingEdge, "agents": [a.to_dict() for a in self.agents]}

    @classmethod
    def from_dict(cls, d: dict) -> "TraceRecord":
        return cls(d["round"], d["missingEdge"], tuple(AgentRecord(**a) for a in d["agents"]))


@dataclass
class RunResult:
    verdict: Verdict
    rounds: int
    final_state: WorldState
    contexts: list[AgentContext]
    trace: list[TraceRecord] = field(default_factory=list)
    # first Phase-2 round, when every agent entered Phase 2 together (None otherwise)
    phase2_start: Optional[int] = None
    cross_events_phase2: int = 0

    @property
    def outcome(self) -> ResultKind:
        return self.verdict.kind

    def schedule(self) -> list[Optional[int]]:
        return [rec.missingEdge for rec in self.trace]


def gathering_oracle(state: WorldState, contexts: Sequence[AgentContext]) -> Optional[Verdict]:
    """Judge a world in which agents may have terminated; None while some still run."""
    for i, c in enumerate(contexts):
        if c.violation:
            return Verdict(ResultKind.PROTOCOL_VIOLATION, state.round, description=f"agent {i}: {c.violation}")
    if not all(c.state is State.TERM for c in contexts):
        return None
    declared = {c.declared for c in contexts}
    if len(declared) > 1:
        return Verdict(ResultKind.PROTOCOL_VIOLATION, state.round, description="agents disagree on the outcome")
    if declared == {Outcome.UNSOLVABLE}:
        return Verdict(ResultKind.DETECTED_UNSOLVABLE, state.round)
    nodes = sorted(state.occupied_nodes())
    n = state.topology.n
    if len(nodes) == 1:
        return Verdict(ResultKind.GATHERED, state.round, node=nodes[0])
    if len(nodes) == 2:
        a, b = nodes
        if (b - a) % n == 1:
            return Verdict(ResultKind.GATHERED, state.round, edge=a)
        if (a - b) % n == 1:
            return Verdict(ResultKind.GATHERED, state.round, edge=b)
    return Verdict(
        ResultKind.PROTOCOL_VIOLATION,
        state.round,
        description=f"terminated as gathered but scattered over nodes {nodes}",
    )


def default_orientations(protocol: ProtocolId, k: int) -> list[Direction]:
    return [Direction.CW] * k


def make_contexts(
    topology: RingTopology,
    protocol: ProtocolId,
    orientations: Optional[Sequence[Direction]] = None,
) -> list[AgentContext]:
    k = topology.k
    if orientations is None:
        orientations = default_orientations(protocol, k)
    if len(orientations) != k:
        raise ConfigurationError(f"need {k} orientations, got {len(orientations)}")
    if protocol.chirality and any(o is not Direction.CW for o in orientations):
        raise ConfigurationError("chiral protocols need every agent's right to be clockwise")
    try:
        return [AgentContext.create(protocol, Direction(o), topology.n, k) for o in orientations]
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def _agent_record(state: WorldState, i: int, c: AgentContext) -> AgentRecord:
    v = c.vars
    d = None if c.last_intent is None else Direction(c.last_intent * int(c.orientation)).name
    return AgentRecord(
        repr(state.locations[i]),
        c.state.value if c.declared is None else f"{c.state.value}:{c.declared.value}",
        d,
        v.ttime,
        v.btime,
        v.esteps,
        v.bperiods,
        bool(state.cross_flags[i]),
    )


def step_agents(world: WorldState, contexts: Sequence[AgentContext], cross_detection: bool):
    intents, out = [], []
    for i, c in enumerate(contexts):
        d, c2 = tick(c, observe(world, i, cross_detection))
        intents.append(d)
        out.append(c2)
    return intents, out


def cached_step(world: WorldState, contexts: Sequence[AgentContext], keys: Sequence[tuple], cross_detection: bool, cache: dict):
    """``step_agents`` through a shared table of ticks.

    A tick depends only on the agent's orientation, its ``key()`` and the observation,
    so runs of one protocol on one ring can share results.  Returns the new keys too.
    The contexts handed back may come from another run: same behaviour, but counters
    past the key's caps can differ, so traces should not be built from them.
    """
    intents, out, new_keys = [], [], []
    for i, c in enumerate(contexts):
        obs = observe(world, i, cross_detection)
        mkey = (c.orientation, keys[i], obs)
        hit = cache.get(mkey)
        if hit is None:
            d, c2 = tick(c, obs)
            hit = cache[mkey] = (d, c2, c2.key())
        intents.append(hit[0])
        out.append(hit[1])
        new_keys.append(hit[2])
    return intents, out, tuple(new_keys)


def run_simulation(
    topology: RingTopology,
    protocol: ProtocolId,
    strategy: AdversaryStrategy,
    max_rounds: Optional[int] = None,
    orientations: Optional[Sequence[Direction]] = None,
    record_trace: bool = True,
    tick_cache: Optional[dict] = None,
) -> RunResult:
    """Step observe -> tick -> adversary -> move until everyone terminates.

    Rounds are numbered from 0; agents act in rounds ``0..max_rounds``.  A
    ``tick_cache`` (any dict, reused across runs of the same protocol and ring) speeds
    up batches; it is ignored while recording a trace.
    """
    contexts = make_contexts(topology, protocol, orientations)
    cache = tick_cache if tick_cache is not None and not record_trace else None
    keys = tuple(c.key() for c in contexts) if cache is not None else ()
    if max_rounds is None:
        max_rounds = round_bound(protocol, topology.n)
    world = WorldState.initial(topology)
    trace: list[TraceRecord] = []
    phase2_start = None
    crossings = 0
    for r in range(max_rounds + 1):
        if cache is None:
            intents, contexts = step_agents(world, contexts, protocol.cross_detection)
        else:
            if len(cache) > TICK_CACHE_LIMIT:
                cache.clear()
            intents, contexts, keys = cached_step(world, contexts, keys, protocol.cross_detection, cache)
        if phase2_start is None and any(c.labels is not None or c.target is not None for c in contexts):
            phase2_start = r
        if phase2_start is not None:
            crossings += sum(world.cross_flags) if r > phase2_start else 0
        verdict = gathering_oracle(world, contexts)
        done = verdict is not None
        missing = None if done else strategy.decide(world, intents, r)
        if record_trace:
            trace.append(TraceRecord(r, missing, tuple(_agent_record(world, i, c) for i, c in enumerate(contexts))))
        if done:
            return RunResult(verdict, r, world, contexts, trace, phase2_start, crossings)
        world = apply_round(world, missing, intents)
    verdict = Verdict(ResultKind.TIMED_OUT, max_rounds)
    return RunResult(verdict, max_rounds, world, contexts, trace, phase2_start, crossings)


def replay(
    topology: RingTopology,
    protocol: ProtocolId,
    trace: Sequence[TraceRecord],
    orientations: Optional[Sequence[Direction]] = None,
    max_rounds: Optional[int] = None,
) -> RunResult:
    script = FixedScript([rec.missingEdge for rec in trace])
    return run_simulation(topology, protocol, script, max_rounds, orientations)


def expected_kind(topology: RingTopology, protocol: ProtocolId) -> ResultKind:
    """Outcome the protocol must report from this configuration."""
    kind = classify(topology).kind
    if kind is ConfigKind.PERIODIC:
        return ResultKind.DETECTED_UNSOLVABLE
    if kind is ConfigKind.EDGE_EDGE and not protocol.cross_detection and not protocol.chirality:
        return ResultKind.DETECTED_UNSOLVABLE
    return ResultKind.GATHERED


def crossing_edges(state: WorldState, intents: Sequence[Optional[Direction]], missing: Optional[int]) -> set[int]:
    """Edges traversed in both directions if ``missing`` is removed this round."""
    n = state.topology.n
    seen: dict[int, set] = {}
    for loc, d in zip(state.locations, intents):
        if d is None:
            continue
        e = edge_between(loc.node, d, n)
        if e != missing:
            seen.setdefault(e, set()).add(d)
    return {e for e, ds in seen.items() if len(ds) == 2}
