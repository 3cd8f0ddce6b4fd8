"""Scenario files (YAML), traces (JSON lines) and result tables (CSV)."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import yaml

from .adversary import AdversaryStrategy, FixedScript, make_strategy
from .harness import RunResult, TraceRecord, run_simulation
from .protocols import Protocol, ProtocolId
from .ring import Direction, RingTopology


class ScenarioError(ValueError):
    pass


def parse_knows(text: str) -> tuple[bool, bool]:
    """``"n"``, ``"k"`` or ``"nk"`` -> (knows_n, knows_k)."""
    t = text.replace("+", "").replace(",", "").strip().lower()
    if not t or set(t) - {"n", "k"}:
        raise ScenarioError(f"knowledge must be n, k or nk, got {text!r}")
    return "n" in t, "k" in t


def parse_orientations(values) -> Optional[list[Direction]]:
    """Accepts ``"CW,CCW"``, a list of names, or ``+1``/``-1`` integers."""
    if values is None:
        return None
    if isinstance(values, str):
        values = [v for v in values.replace(" ", "").split(",") if v]
    out = []
    for v in values:
        if isinstance(v, int):
            out.append(Direction(v))
        else:
            try:
                out.append(Direction[str(v).upper()])
            except KeyError:
                raise ScenarioError(f"unknown orientation {v!r} (use CW or CCW)") from None
    return out


@dataclass
class Scenario:
    n: int
    homebases: list[int]
    protocol: str = "CrossNoChir"
    knows: str = "n"
    adversary: str = "none"
    seed: int = 0
    max_rounds: Optional[int] = None
    port_labels: Optional[list[list[int]]] = None
    orientations: Optional[list[str]] = None
    script: Optional[list[Optional[int]]] = None
    bperiods_threshold: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def topology(self) -> RingTopology:
        labels = tuple(tuple(p) for p in self.port_labels) if self.port_labels else ()
        try:
            return RingTopology(self.n, tuple(self.homebases), labels)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    def protocol_id(self) -> ProtocolId:
        knows_n, knows_k = parse_knows(self.knows)
        try:
            return ProtocolId(Protocol(self.protocol), knows_n, knows_k, self.bperiods_threshold)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    def strategy(self) -> AdversaryStrategy:
        if self.script is not None:
            return FixedScript(self.script)
        try:
            return make_strategy(self.adversary, self.topology(), self.seed)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    def run(self, record_trace: bool = True) -> RunResult:
        return run_simulation(
            self.topology(),
            self.protocol_id(),
            self.strategy(),
            self.max_rounds,
            parse_orientations(self.orientations),
            record_trace,
        )

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "extra" and v is not None}
        d.update(self.extra)
        return d


_FIELDS = {f for f in Scenario.__dataclass_fields__ if f != "extra"}


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioError("scenario must be a mapping")
    missing = {"n", "homebases"} - d.keys()
    if missing:
        raise ScenarioError(f"scenario lacks {sorted(missing)}")
    known = {k: v for k, v in d.items() if k in _FIELDS}
    extra = {k: v for k, v in d.items() if k not in _FIELDS}
    return Scenario(**known, extra=extra)


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(yaml.safe_load(fh))


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(scenario.to_dict(), fh, sort_keys=False)


def write_trace(trace: Iterable[TraceRecord], path) -> None:
    with open(path, "w") as fh:
        for rec in trace:
            fh.write(json.dumps(rec.to_dict(), separators=(",", ":")) + "\n")


def read_trace(path) -> list[TraceRecord]:
    with open(path) as fh:
        return [TraceRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_table(rows: Sequence[dict], path) -> None:
    path = Path(path)
    fields: list[str] = []
    for r in rows:
        for k in r:
            if k not in fields:
                fields.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
