import pytest

from dynring.adversary import NoRemoval, PersistentEdge
from dynring.harness import ResultKind, make_contexts, run_simulation, step_agents
from dynring.protocols import (
    AgentContext,
    Outcome,
    Protocol,
    ProtocolError,
    ProtocolId,
    State,
    round_bound,
    tick,
    tick_cross_chir,
    tick_cross_no_chir,
)
from dynring.ring import Direction, RingTopology, WorldState, apply_round, observe

CW, CCW = Direction.CW, Direction.CCW
CNC = ProtocolId(Protocol.CROSS_NO_CHIR)
CC_N = ProtocolId(Protocol.CROSS_CHIR)
CC_K = ProtocolId(Protocol.CROSS_CHIR, knows_n=False, knows_k=True)
NCC = ProtocolId(Protocol.NO_CROSS_CHIR)
NCNC = ProtocolId(Protocol.NO_CROSS_NO_CHIR)


def test_knowledge_preconditions():
    with pytest.raises(ProtocolError):
        ProtocolId(Protocol.CROSS_NO_CHIR, knows_n=False, knows_k=True)
    with pytest.raises(ProtocolError):
        ProtocolId(Protocol.NO_CROSS_NO_CHIR, knows_n=False, knows_k=True)
    with pytest.raises(ProtocolError):
        ProtocolId(Protocol.CROSS_CHIR, knows_n=False, knows_k=False)
    ProtocolId(Protocol.NO_CROSS_CHIR, knows_n=False, knows_k=True)


def test_context_needs_the_promised_knowledge():
    with pytest.raises(ProtocolError):
        AgentContext.create(CNC, CW, n=None, k=3)
    with pytest.raises(ProtocolError):
        AgentContext.create(CC_N, CCW, n=5, k=2)


def test_tick_wrappers_check_the_protocol():
    ctx = AgentContext.create(CC_N, CW, n=5, k=2)
    w = WorldState.initial(RingTopology(5, (0, 2)))
    with pytest.raises(ProtocolError):
        tick_cross_no_chir(ctx, observe(w, 0))
    intent, _ = tick_cross_chir(ctx, observe(w, 0))
    assert intent is CW


def test_term_is_absorbing():
    ctx = AgentContext.create(CNC, CW, n=5, k=2)
    ctx.state = State.TERM
    w = WorldState.initial(RingTopology(5, (0, 2)))
    intent, same = tick(ctx, observe(w, 0))
    assert intent is None and same is ctx


def test_tick_leaves_input_context_untouched():
    ctx = AgentContext.create(CNC, CW, n=5, k=2)
    w = WorldState.initial(RingTopology(5, (0, 2)))
    before = ctx.key()
    tick(ctx, observe(w, 0))
    assert ctx.key() == before


@pytest.mark.parametrize("n, hbs", [(5, (0, 1)), (6, (0, 1, 3)), (7, (0, 2, 3)), (8, (0, 1, 2, 5))])
def test_cross_no_chir_lockstep_walkers_tour_then_gather(n, hbs):
    # equal orientations and no removals: nobody meets in phase 1, so every agent
    # finishes a full tour, learns k, and the second phase does the gathering
    t = RingTopology(n, hbs)
    res = run_simulation(t, CNC, NoRemoval(), orientations=[CW] * t.k)
    assert res.phase2_start == 12 * n
    assert all(c.vars.total_agents == t.k for c in res.contexts)
    assert res.outcome is ResultKind.GATHERED
    assert res.rounds <= 22 * n


def test_cross_no_chir_periodic_declares_unsolvable():
    res = run_simulation(RingTopology(6, (0, 2, 4)), CNC, NoRemoval(), orientations=[CW, CCW, CW])
    assert res.outcome is ResultKind.DETECTED_UNSOLVABLE
    assert all(c.declared is Outcome.UNSOLVABLE for c in res.contexts)


@pytest.mark.parametrize("edge", range(7))
def test_cross_no_chir_persistent_edge_phase2_within_10n(edge):
    n = 7
    t = RingTopology(n, (0, 1, 3))
    res = run_simulation(t, CNC, PersistentEdge(edge), orientations=[CW, CCW, CCW])
    assert res.outcome is ResultKind.GATHERED
    if res.phase2_start is not None:
        assert res.rounds - res.phase2_start <= 10 * n


def test_cross_chir_known_k_learns_n_after_k_plus_one_homebases():
    t = RingTopology(6, (0, 3))
    contexts = make_contexts(t, CC_K)
    world = WorldState.initial(t)
    learned_at = None
    for r in range(8):
        intents, contexts = step_agents(world, contexts, True)
        if learned_at is None and contexts[0].n is not None:
            learned_at = r
        world = apply_round(world, None, intents)
    assert contexts[0].n == 6
    # walking counter-clockwise from 0 the marks are met at rounds 0, 3 and 6
    assert learned_at == 6


@pytest.mark.parametrize("edge", [0, 3, 5])
def test_cross_chir_known_n_blocked_edge_terminates_at_6n(edge):
    n = 8
    t = RingTopology(n, (0, 2, 5))
    res = run_simulation(t, CC_N, PersistentEdge(edge))
    assert res.outcome is ResultKind.GATHERED
    assert res.rounds == 6 * n


def test_cross_chir_known_k_merge_before_3n():
    t = RingTopology(8, (0, 1))
    # agents walk counter-clockwise; edge 7 keeps the agent at node 0 waiting
    res = run_simulation(t, CC_K, PersistentEdge(7))
    assert res.outcome is ResultKind.GATHERED
    assert res.rounds < 3 * 8


def test_no_cross_chir_blocked_elected_edge_still_gathers():
    n = 7
    t = RingTopology(n, (0, 1, 3))  # asymmetric, leader node 0
    res = run_simulation(t, NCC, PersistentEdge(0))
    assert res.outcome is ResultKind.GATHERED
    assert res.rounds <= round_bound(NCC, n)


def test_no_cross_no_chir_long_removal_in_phase1():
    n = 6
    t = RingTopology(n, (0, 1, 3))
    res = run_simulation(t, NCNC, PersistentEdge(4), orientations=[CW, CCW, CW])
    assert res.outcome is ResultKind.GATHERED
    assert res.rounds < 3 * n * (n + 3)
    assert res.verdict.edge == 4 or res.verdict.node is not None


def test_no_cross_no_chir_edge_edge_is_unsolvable():
    t = RingTopology(6, (0, 1))
    res = run_simulation(t, NCNC, NoRemoval(), orientations=[CW, CCW])
    assert res.outcome is ResultKind.DETECTED_UNSOLVABLE


@pytest.mark.parametrize("ori", [(CW, CW, CW), (CW, CCW, CW), (CCW, CCW, CW)])
def test_no_cross_no_chir_asymmetric_gathers(ori):
    t = RingTopology(7, (0, 1, 3))
    res = run_simulation(t, NCNC, NoRemoval(), orientations=ori)
    assert res.outcome is ResultKind.GATHERED
    assert res.rounds <= round_bound(NCNC, 7)


def test_round_bounds():
    assert round_bound(CNC, 16) == 352
    assert round_bound(CC_N, 10) == 160
    assert round_bound(CC_K, 10) == 131
    # 6n + 3n + (n + 4n+8 + 2) * period with period = 2*ceil(log2 n) + 2
    assert round_bound(NCC, 16) == 96 + 48 + (16 + 72 + 2) * 10
