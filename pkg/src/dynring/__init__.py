"""Gathering of anonymous mobile agents on 1-interval-connected dynamic rings.

Simulator, configuration analysis, the four gathering protocols, adversaries and an
exhaustive schedule checker.
"""
from .adversary import (
    AdversaryStrategy,
    FixedScript,
    GreedySeparator,
    NoRemoval,
    PairBlocker,
    PersistentEdge,
    RandomEdge,
    SymmetricBlocker,
    make_strategy,
)
from .checker import CheckResult, CheckVerdict, model_check
from .config import ConfigClass, ConfigKind, ElectionResult, classify, compute_inter_distances, delta_min, elect
from .harness import ResultKind, RunResult, TraceRecord, Verdict, gathering_oracle, replay, run_simulation
from .logic_ring import LogicRingLabels, build_labels
from .protocols import Protocol, ProtocolId, State, round_bound
from .ring import Direction, Location, Observation, RingTopology, WorldState, apply_round, observe
from .scenario import Scenario, load_scenario, read_trace, write_trace
from .sweep import canonical_configs, strategy_suite, sweep

__all__ = [
    "AdversaryStrategy", "FixedScript", "GreedySeparator", "NoRemoval", "PairBlocker", "PersistentEdge",
    "RandomEdge", "SymmetricBlocker", "make_strategy",
    "CheckResult", "CheckVerdict", "model_check",
    "ConfigClass", "ConfigKind", "ElectionResult", "classify", "compute_inter_distances", "delta_min", "elect",
    "ResultKind", "RunResult", "TraceRecord", "Verdict", "gathering_oracle", "replay", "run_simulation",
    "LogicRingLabels", "build_labels",
    "Protocol", "ProtocolId", "State", "round_bound",
    "Direction", "Location", "Observation", "RingTopology", "WorldState", "apply_round", "observe",
    "Scenario", "load_scenario", "read_trace", "write_trace",
    "canonical_configs", "strategy_suite", "sweep",
]
