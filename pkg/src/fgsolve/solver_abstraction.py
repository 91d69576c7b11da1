"""Polynomial-time solver for T^A x T^X >= T^B over t-abstractions.

For every alignment i of A's cycle on B's, X is rebuilt column by column:
rows r < p_X are obtained by ``ms_division`` of ``TB[r,h] - M2`` by ``M1``,
rows r >= p_X only re-check the product.  A contradiction drops the
alignment; the survivors are returned in ascending alignment order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import gcd

from .errors import SolverTimeout
from .multiset import EMPTY, MultisetError, ms_diff, ms_division
from .tabstraction import (
    TAbstraction,
    abstraction_product_check,
    m1_term,
    m2_term,
    product_cell,
)


@dataclass(frozen=True)
class AbstractionSolution:
    alignment: int
    tx: TAbstraction


class Contradiction(Exception):
    """An alignment cannot be completed; ``cell`` is the (r, h) where it broke."""

    def __init__(self, message: str, cell: tuple[int, int] | None = None):
        super().__init__(message)
        self.cell = cell


@dataclass
class AlignmentTrace:
    """Columns of T^X filled before the alignment finished or broke."""

    alignment: int
    columns: list[list]  # columns[r][h - 1], EMPTY where not reached
    completed_columns: int = 0
    failure: Contradiction | None = None


def _solve_alignment(
    ta: TAbstraction, tb: TAbstraction, p_x: int, i: int, trace: AlignmentTrace | None = None
) -> TAbstraction:
    width = tb.width
    cols: list[list] = [[EMPTY] * width for _ in range(p_x)]
    if trace is not None:
        trace.columns = cols
    partial = TAbstraction(tuple(tuple(row) for row in cols))
    expected = [1] * p_x
    for h in range(1, width + 1):
        for r in range(tb.p):
            if r < p_x:
                m1 = m1_term(ta, r, h, i)
                m2 = m2_term(ta, partial, r, h, i)
                try:
                    m3 = ms_diff(tb.cell(r, h), m2)
                    q = ms_division(m3, m1)
                except MultisetError as exc:
                    raise Contradiction(str(exc), (r, h)) from exc
                if len(q) != expected[r]:
                    raise Contradiction(
                        f"cell ({r},{h}) has {len(q)} values, expected {expected[r]}", (r, h)
                    )
                cols[r][h - 1] = q
                if r == p_x - 1:
                    partial = TAbstraction(tuple(tuple(row) for row in cols))
            elif product_cell(ta, partial, r, h, i) != tb.cell(r, h):
                raise Contradiction(f"verification failed at ({r},{h})", (r, h))
        # the cyclic predecessor is not a transient, so it is dropped once
        expected = [
            cols[r][h - 1].total() - (1 if h == 1 else 0) for r in range(p_x)
        ]
        if trace is not None:
            trace.completed_columns = h
    if any(expected):
        raise Contradiction("X would have transients deeper than B allows")
    tx = TAbstraction(tuple(tuple(row) for row in cols)).trimmed()
    if not abstraction_product_check(ta, tx, tb, i):
        raise Contradiction("final product check failed")
    return tx


def solve_abstraction(
    ta: TAbstraction,
    tb: TAbstraction,
    p_x: int,
    *,
    deadline: float | None = None,
) -> list[AbstractionSolution]:
    """Every T^X (one per surviving alignment) with T^A x T^X >= T^B."""
    if p_x < 1:
        raise ValueError("p_x must be positive")
    if ta.p * p_x // gcd(ta.p, p_x) != tb.p:
        raise ValueError(f"lcm({ta.p}, {p_x}) != {tb.p}")
    out = []
    for i in range(ta.p):
        if deadline is not None and time.monotonic() > deadline:
            raise SolverTimeout("abstraction solver timed out")
        try:
            tx = _solve_alignment(ta, tb, p_x, i)
        except Contradiction:
            continue
        out.append(AbstractionSolution(alignment=i, tx=tx))
    return out


def trace_alignment(ta: TAbstraction, tb: TAbstraction, p_x: int, i: int) -> AlignmentTrace:
    """Run one alignment and report how far the reconstruction got."""
    trace = AlignmentTrace(alignment=i, columns=[])
    try:
        _solve_alignment(ta, tb, p_x, i, trace)
    except Contradiction as exc:
        trace.failure = exc
    return trace


def admissible_periods(p_a: int, p_b: int) -> list[int]:
    """All p_x with lcm(p_a, p_x) == p_b, ascending (divisors of p_b)."""
    return [
        k for k in range(1, p_b + 1)
        if p_b % k == 0 and p_a * k // gcd(p_a, k) == p_b
    ]
