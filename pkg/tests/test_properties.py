from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dynring.adversary import RandomEdge
from dynring.harness import ResultKind, expected_kind, gathering_oracle, make_contexts, run_simulation
from dynring.protocols import Outcome, Protocol, ProtocolId, State
from dynring.ring import Direction, Location, RingTopology, WorldState, apply_round, edge_between

CW, CCW = Direction.CW, Direction.CCW
PROTOCOLS = [
    ProtocolId(Protocol.CROSS_NO_CHIR),
    ProtocolId(Protocol.CROSS_CHIR),
    ProtocolId(Protocol.CROSS_CHIR, knows_n=False, knows_k=True),
    ProtocolId(Protocol.NO_CROSS_CHIR, knows_n=False, knows_k=True),
    ProtocolId(Protocol.NO_CROSS_NO_CHIR),
]


@st.composite
def topologies(draw, max_n=8):
    n = draw(st.integers(3, max_n))
    hbs = draw(st.sets(st.integers(0, n - 1), min_size=2, max_size=n))
    return RingTopology(n, tuple(sorted(hbs)))


@st.composite
def worlds(draw):
    t = draw(topologies())
    locs = []
    for _ in range(t.k):
        node = draw(st.integers(0, t.n - 1))
        kind = draw(st.sampled_from(["at", "in", "out"]))
        d = draw(st.sampled_from([CW, CCW]))
        locs.append(Location.at_node(node) if kind == "at" else Location.in_buffer(node, d) if kind == "in" else Location.out_buffer(node, d))
    intents = draw(st.lists(st.sampled_from([None, CW, CCW]), min_size=t.k, max_size=t.k))
    missing = draw(st.one_of(st.none(), st.integers(0, t.n - 1)))
    return WorldState(t, tuple(locs)), intents, missing


@given(worlds())
def test_moves_conserve_agents_and_respect_the_missing_edge(case):
    w, intents, missing = case
    w2 = apply_round(w, missing, intents)
    n = w.topology.n
    assert len(w2.locations) == len(w.locations)
    for before, after, d in zip(w.locations, w2.locations, intents):
        if d is None:
            assert after == Location.at_node(before.node)
        elif edge_between(before.node, d, n) == missing:
            assert after == Location.out_buffer(before.node, d)
        else:
            assert after == Location.in_buffer((before.node + d) % n, d)


@given(worlds())
def test_cross_flags_come_in_opposite_pairs(case):
    w, intents, missing = case
    w2 = apply_round(w, missing, intents)
    n = w.topology.n
    moves = [
        (edge_between(loc.node, d, n), d)
        for loc, d in zip(w.locations, intents)
        if d is not None and edge_between(loc.node, d, n) != missing
    ]
    for i, flag in enumerate(w2.cross_flags):
        d = intents[i]
        if d is None or edge_between(w.locations[i].node, d, n) == missing:
            assert not flag
            continue
        e = edge_between(w.locations[i].node, d, n)
        assert flag == ((e, d.opposite()) in moves)


@given(worlds())
def test_oracle_matches_a_direct_check(case):
    w, _, _ = case
    t = w.topology
    ctxs = make_contexts(t, PROTOCOLS[0])
    for c in ctxs:
        c.state, c.declared = State.TERM, Outcome.GATHERED
    v = gathering_oracle(w, ctxs)
    nodes = {loc.node for loc in w.locations}
    adjacent = len(nodes) == 2 and any((a + 1) % t.n in nodes for a in nodes)
    assert (v.kind is ResultKind.GATHERED) == (len(nodes) == 1 or adjacent)


def _orientations(pid, k, bits):
    if pid.chirality:
        return [CW] * k
    return [CW if (bits >> i) & 1 else CCW for i in range(k)]


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(topologies(max_n=7), st.sampled_from(PROTOCOLS), st.integers(0, 2**10), st.integers(0, 10**6))
def test_runs_are_deterministic_and_agents_agree(t, pid, bits, seed):
    ori = _orientations(pid, t.k, bits)
    a = run_simulation(t, pid, RandomEdge(seed), orientations=ori)
    b = run_simulation(t, pid, RandomEdge(seed), orientations=ori)
    assert a.trace == b.trace and a.verdict == b.verdict
    # whatever the schedule, no run ends scattered, split in opinion or late
    assert a.outcome in (ResultKind.GATHERED, ResultKind.DETECTED_UNSOLVABLE)
    if a.outcome is ResultKind.DETECTED_UNSOLVABLE:
        assert all(c.declared is Outcome.UNSOLVABLE for c in a.contexts)


@settings(max_examples=40, deadline=None)
@given(topologies(max_n=7), st.integers(0, 2**10), st.integers(0, 10**6))
def test_cross_detecting_protocols_gather_whenever_solvable(t, bits, seed):
    pid = PROTOCOLS[0]
    res = run_simulation(t, pid, RandomEdge(seed), orientations=_orientations(pid, t.k, bits))
    if expected_kind(t, pid) is ResultKind.GATHERED:
        assert res.outcome is ResultKind.GATHERED
