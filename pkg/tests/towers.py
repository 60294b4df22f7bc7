"""Towers shared by several test modules."""

from __future__ import annotations

from aswt.expsums import TowerSpec
from aswt.galois_ring import field_ctx


def cubic() -> TowerSpec:
    return TowerSpec(2, 1, {0: (0, 0, 0, 1)}, name="cubic")


def two_row() -> TowerSpec:
    return TowerSpec(2, 1, {0: (0, 1), 1: (0, 0, 0, 1)}, name="two-row")


def f4_cubic() -> TowerSpec:
    F = field_ctx(2, 2)
    return TowerSpec(2, 2, {0: (F.zero, F.zero, F.zero, F.gen())}, name="f4-cubic")
