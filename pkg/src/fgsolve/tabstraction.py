"""Layer matrices and t-abstractions of connected functional graphs.

For a component with cycle g(0), ..., g(p-1) (g(r+1) = f(g(r))):

* the layer matrix holds, at (r, h), the transient nodes whose path of
  length h ends in g(r);
* the t-abstraction holds, at (r, h), the multiset of indegrees of the nodes
  at layer h - 1 above g(r) (layer 0 being g(r) itself).

Rows are taken modulo the cycle length; cells outside the stored columns are
empty.  Alignments ``i`` are 0-based: B's cyclic node r is paired with A's
cyclic node r + i and X's cyclic node r.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .graph import ComponentView, FunctionalGraph
from .multiset import EMPTY, Multiset, ms_product, ms_sum_all, parse_multiset


@dataclass(frozen=True)
class LayerMatrix:
    cycle: tuple[int, ...]
    cells: tuple[tuple[frozenset[int], ...], ...]  # cells[r][h - 1]

    @property
    def p(self) -> int:
        return len(self.cycle)

    @property
    def h_max(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def cell(self, r: int, h: int) -> frozenset[int]:
        if h < 1 or h > self.h_max:
            return frozenset()
        return self.cells[r % self.p][h - 1]


@dataclass(frozen=True)
class TAbstraction:
    cells: tuple[tuple[Multiset, ...], ...]  # cells[r][h - 1], h = 1..width

    @property
    def p(self) -> int:
        return len(self.cells)

    @property
    def width(self) -> int:
        """Number of columns, i.e. h_max + 1."""
        return len(self.cells[0]) if self.cells else 0

    @property
    def h_max(self) -> int:
        return self.width - 1

    def cell(self, r: int, h: int) -> Multiset:
        if h < 1 or h > self.width:
            return EMPTY
        return self.cells[r % self.p][h - 1]

    def __getitem__(self, key: tuple[int, int]) -> Multiset:
        return self.cell(*key)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Multiset | str | Iterable[int]]]) -> "TAbstraction":
        """Build from a literal matrix; cells may be ``Multiset``, ``"[..]"`` or iterables."""

        def conv(c):
            if isinstance(c, Multiset):
                return c
            if isinstance(c, str):
                return parse_multiset(c)
            return Multiset(c)

        width = max((len(r) for r in rows), default=0)
        cells = tuple(
            tuple(conv(c) for c in row) + (EMPTY,) * (width - len(row)) for row in rows
        )
        return cls(cells).trimmed()

    def trimmed(self) -> "TAbstraction":
        """Drop trailing columns that are empty in every row."""
        w = self.width
        while w > 1 and all(not row[w - 1] for row in self.cells):
            w -= 1
        if w == self.width:
            return self
        return TAbstraction(tuple(row[:w] for row in self.cells))

    def rotated(self, k: int) -> "TAbstraction":
        """Same abstraction indexed from cyclic row ``k``."""
        p = self.p
        return TAbstraction(tuple(self.cells[(r + k) % p] for r in range(p)))

    def render(self) -> str:
        """Rows ``r: cell cell ...`` with cells in bracket notation, columns h = 1.."""
        lines = []
        for r, row in enumerate(self.cells):
            lines.append(f"{r}: " + " ".join(str(c) for c in row))
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.render()


def _view(g: FunctionalGraph, comp: ComponentView | None) -> ComponentView:
    return comp if comp is not None else g.component()


def _cycle_from(comp: ComponentView, start: int | None) -> tuple[int, ...]:
    if start is None:
        return comp.cycle
    k = comp.cycle.index(start)
    return comp.cycle[k:] + comp.cycle[:k]


def layer_matrix(
    g: FunctionalGraph, comp: ComponentView | None = None, start: int | None = None
) -> LayerMatrix:
    comp = _view(g, comp)
    cycle = _cycle_from(comp, start)
    cyc = g.is_cyclic
    rows = []
    h_max = comp.h_max
    for c in cycle:
        layer = [u for u in g.preds[c] if not cyc[u]]
        row = []
        for _ in range(h_max):
            row.append(frozenset(layer))
            layer = [u for v in layer for u in g.preds[v]]
        rows.append(tuple(row))
    return LayerMatrix(cycle=cycle, cells=tuple(rows))


def t_abstraction(
    g: FunctionalGraph, comp: ComponentView | None = None, start: int | None = None
) -> TAbstraction:
    comp = _view(g, comp)
    lm = layer_matrix(g, comp, start)
    rows = []
    for r, c in enumerate(lm.cycle):
        row = [Multiset([len(g.preds[c])])]
        for h in range(1, lm.h_max + 1):
            row.append(Multiset(len(g.preds[v]) for v in lm.cell(r, h)))
        rows.append(tuple(row))
    return TAbstraction(tuple(rows))


def t_abstractions(g: FunctionalGraph) -> list[TAbstraction]:
    """The t-abstraction of every component (a multiset, returned as a list)."""
    return [t_abstraction(g, comp) for comp in g.components()]


# -- the aligned product formula ---------------------------------------------


def m1_term(ta: TAbstraction, r: int, h: int, i: int) -> Multiset:
    """Sum over j = 0..h-1 of TA[r - j + i, h - j]."""
    return ms_sum_all(ta.cell(r - j + i, h - j) for j in range(h))


def lower_layers(tx: TAbstraction, r: int, h: int) -> Multiset:
    """Sum over j = 1..h-1 of TX[r - j, h - j]."""
    return ms_sum_all(tx.cell(r - j, h - j) for j in range(1, h))


def m2_term(ta: TAbstraction, tx: TAbstraction, r: int, h: int, i: int) -> Multiset:
    """TA[r + i, h] (x) sum over j = 1..h-1 of TX[r - j, h - j]."""
    top = ta.cell(r + i, h)
    if not top:
        return EMPTY
    return ms_product(top, lower_layers(tx, r, h))


def product_cell(ta: TAbstraction, tx: TAbstraction, r: int, h: int, i: int) -> Multiset:
    """Cell (r, h) of the component of TA x TX selected by alignment ``i``."""
    return ms_product(tx.cell(r, h), m1_term(ta, r, h, i)) + m2_term(ta, tx, r, h, i)


def abstraction_product_check(
    ta: TAbstraction, tx: TAbstraction, tb: TAbstraction, i: int
) -> bool:
    if tb.p != ta.p * tx.p // gcd(ta.p, tx.p):
        return False
    width = max(ta.width, tx.width, tb.width)
    for h in range(1, width + 1):
        for r in range(tb.p):
            if product_cell(ta, tx, r, h, i) != tb.cell(r, h):
                return False
    return True
