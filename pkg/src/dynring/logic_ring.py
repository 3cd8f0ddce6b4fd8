"""Periodic per-edge traversal labels that keep opposite-direction movers from crossing.

Edge ``i`` of the logic ring is the ``i``-th edge met walking counter-clockwise from the
anchor (leader) node.  Its counter-clockwise traversal may happen only at rounds whose
residue modulo ``period`` is in ``x_residues(i)``; the clockwise one only in
``y_residues(i)``, the complement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .ring import Direction


def _log2_ceil(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


@dataclass(frozen=True)
class LogicRingLabels:
    n: int
    anchor: int = 0

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"logic ring needs n >= 3, got {self.n}")

    @property
    def p(self) -> int:
        return _log2_ceil(self.n)

    @property
    def period(self) -> int:
        return 2 * self.p + 2

    @cached_property
    def subsets(self) -> tuple[frozenset[int], ...]:
        p = self.p
        out = []
        for i in range(self.n):
            low = {b for b in range(p) if i >> b & 1}
            high = set(range(p, p + p - len(low)))
            out.append(frozenset(low | high))
        return tuple(out)

    @cached_property
    def _x(self) -> tuple[frozenset[int], ...]:
        return tuple(s | {2 * self.p} for s in self.subsets)

    @cached_property
    def _y(self) -> tuple[frozenset[int], ...]:
        full = frozenset(range(self.period))
        return tuple(full - x for x in self._x)

    def x_residues(self, i: int) -> frozenset[int]:
        return self._x[i]

    def y_residues(self, i: int) -> frozenset[int]:
        return self._y[i]

    def logic_index(self, edge: int) -> int:
        """Logic-ring index of global edge ``edge`` (joining ``edge`` and ``edge+1``)."""
        return (self.anchor - 1 - edge) % self.n

    def may_move(self, edge: int, direction: Direction, round_: int) -> bool:
        i = self.logic_index(edge)
        allowed = self._x[i] if direction is Direction.CCW else self._y[i]
        return round_ % self.period in allowed

    def intersection_witness(self, i: int, j: int, window_start: int, kind: str = "xy") -> Optional[int]:
        """First round in ``[window_start, window_start + period)`` lying in both label sets.

        ``kind`` picks the pairing: ``"xy"`` (X_i vs Y_j), ``"xx"`` or ``"yy"``.
        """
        a = self._x[i] if kind[0] == "x" else self._y[i]
        b = self._x[j] if kind[1] == "x" else self._y[j]
        for r in range(window_start, window_start + self.period):
            if r % self.period in a and r % self.period in b:
                return r
        return None

    def table(self) -> list[dict]:
        return [
            {
                "edge": i,
                "S": sorted(self.subsets[i]),
                "X": sorted(self._x[i]),
                "Y": sorted(self._y[i]),
            }
            for i in range(self.n)
        ]


def build_labels(n: int, anchor: int = 0) -> LogicRingLabels:
    return LogicRingLabels(n, anchor)
