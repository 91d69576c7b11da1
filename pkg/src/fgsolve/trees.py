"""Finite in-trees: cuts of unrolls, the layerwise product, rolls, hom counts.

Unrolls are infinite, so they are only ever handled through ``unroll_cut``.
Every tree here is stored breadth-first with the root at index 0; the root's
parent is itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from .errors import SizeLimit
from .graph import FunctionalGraph


class NotCyclic(ValueError):
    """An unroll or roll was requested from a transient node."""


@dataclass(frozen=True)
class InTree:
    parent: tuple[int, ...]
    labels: tuple[Hashable, ...] | None = None

    def __post_init__(self):
        if not self.parent or self.parent[0] != 0:
            raise ValueError("node 0 must be the root and point to itself")
        for v in range(1, len(self.parent)):
            if not 0 <= self.parent[v] < v:
                raise ValueError("nodes must be listed parents-first")

    @property
    def root(self) -> int:
        return 0

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def level(self) -> tuple[int, ...]:
        lv = [0] * self.n
        for v in range(1, self.n):
            lv[v] = lv[self.parent[v]] + 1
        return tuple(lv)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in range(self.n)]
        for v in range(1, self.n):
            kids[self.parent[v]].append(v)
        return tuple(tuple(k) for k in kids)

    @property
    def height(self) -> int:
        return max(self.level)

    def levels(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.height + 1)]
        for v, lv in enumerate(self.level):
            out[lv].append(v)
        return out

    def label(self, v: int) -> Hashable:
        return v if self.labels is None else self.labels[v]

    def edges(self) -> list[tuple[int, int]]:
        return [(v, self.parent[v]) for v in range(1, self.n)]

    @cached_property
    def code(self) -> str:
        codes = [""] * self.n
        for v in range(self.n - 1, -1, -1):
            codes[v] = "(" + "".join(sorted(codes[c] for c in self.children[v])) + ")"
        return codes[0]

    def cut(self, t: int) -> "InTree":
        keep = [v for v in range(self.n) if self.level[v] <= t]
        return _subtree(self, keep)

    def to_dot(self, name: str = "T") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for v in range(self.n):
            lines.append(f'  {v} [label="{self.label(v)}"];')
        for v, p in self.edges():
            lines.append(f"  {v} -> {p};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _subtree(t: InTree, keep: Sequence[int]) -> InTree:
    index = {v: i for i, v in enumerate(keep)}
    parent = tuple(index[t.parent[v]] for v in keep)
    labels = None if t.labels is None else tuple(t.labels[v] for v in keep)
    return InTree(parent, labels)


def from_parents(parent: Sequence[int]) -> InTree:
    """Build from any parent array with exactly one self-pointing root; reorders breadth-first."""
    roots = [v for v, p in enumerate(parent) if p == v]
    if len(roots) != 1:
        raise ValueError("an in-tree needs exactly one root")
    kids: list[list[int]] = [[] for _ in parent]
    for v, p in enumerate(parent):
        if p != v:
            kids[p].append(v)
    order = [roots[0]]
    for v in order:
        order.extend(kids[v])
    if len(order) != len(parent):
        raise ValueError("parent array contains a cycle")
    index = {v: i for i, v in enumerate(order)}
    return InTree(tuple(index[parent[v]] for v in order), tuple(order))


def trees_isomorphic(a: InTree, b: InTree) -> bool:
    return a.n == b.n and a.code == b.code


def path_tree(s: int) -> InTree:
    """Directed path with ``s`` edges, as an in-tree."""
    return InTree(tuple([0] + list(range(s))))


def unroll_cut(g: FunctionalGraph, v: int, t: int) -> InTree:
    """Levels 0..t of the unroll of ``g`` from cyclic ``v``; labels are (node, level)."""
    if not g.is_cyclic[v]:
        raise NotCyclic(f"node {v} is not cyclic")
    if t < 0:
        raise ValueError("cut depth must be non-negative")
    parent = [0]
    labels = [(v, 0)]
    frontier = [0]
    for lv in range(1, t + 1):
        nxt = []
        for k in frontier:
            for u in g.preds[labels[k][0]]:
                parent.append(k)
                labels.append((u, lv))
                nxt.append(len(parent) - 1)
        frontier = nxt
    return InTree(tuple(parent), tuple(labels))


def intree_product(f1: InTree, f2: InTree) -> InTree:
    """Layerwise direct product; labels are pairs of the factors' labels."""
    parent = [0]
    pairs = [(0, 0)]
    head = 0
    while head < len(pairs):
        x, y = pairs[head]
        for cx in f1.children[x]:
            for cy in f2.children[y]:
                parent.append(head)
                pairs.append((cx, cy))
        head += 1
    labels = tuple((f1.label(x), f2.label(y)) for x, y in pairs)
    return InTree(tuple(parent), labels)


def roll_unroll(g: FunctionalGraph, v: int, rho: int) -> FunctionalGraph:
    """The roll of length ``rho`` of the unroll of ``g`` from ``v``.

    Spine node s_k is (c_k, k), c_k the cyclic predecessor chain of v.  The
    component kept holds s_0..s_{rho-1} with their finite side subtrees; the
    root's new successor is s_{rho-1}, closing a cycle of length ``rho``.
    Node 0 of the result is the root.
    """
    if not g.is_cyclic[v]:
        raise NotCyclic(f"node {v} is not cyclic")
    if rho < 1:
        raise ValueError("rho must be at least 1")
    cyc = g.is_cyclic
    spine = [v]
    for _ in range(rho - 1):
        spine.append(next(u for u in g.preds[spine[-1]] if cyc[u]))
    succ = [0] * rho
    for k in range(1, rho):
        succ[k] = k - 1
    succ[0] = rho - 1
    for k, c in enumerate(spine):
        stack = [(u, k) for u in g.preds[c] if not cyc[u]]
        while stack:
            u, parent = stack.pop()
            succ.append(parent)
            me = len(succ) - 1
            stack.extend((w, me) for w in g.preds[u])
    return FunctionalGraph(succ)


# -- homomorphism counting ------------------------------------------------------


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, obj) -> "Digraph":
        if isinstance(obj, Digraph):
            return obj
        if isinstance(obj, InTree):
            return cls(obj.n, tuple(obj.edges()))
        if isinstance(obj, FunctionalGraph):
            return cls(obj.n, tuple(enumerate(obj.succ)))
        n, edges = obj
        return cls(n, tuple((int(a), int(b)) for a, b in edges))


HOM_BUDGET = 10**7


def _hom_search(g: Digraph, f: Digraph, fixed: dict[int, Iterable[int]] | None) -> int:
    out_f: list[set[int]] = [set() for _ in range(f.n)]
    for a, b in f.edges:
        out_f[a].add(b)
    # constraints checked as soon as both endpoints are placed
    checks: list[list[tuple[int, bool]]] = [[] for _ in range(g.n)]
    for a, b in g.edges:
        later = max(a, b)
        checks[later].append((min(a, b) if a != b else a, a == later))
    domain = [list(range(f.n)) for _ in range(g.n)]
    for v, allowed in (fixed or {}).items():
        domain[v] = list(allowed)
    image = [0] * g.n

    def ok(v: int, x: int) -> bool:
        for other, v_is_tail in checks[v]:
            if other == v:
                if x not in out_f[x]:
                    return False
            elif v_is_tail:
                if image[other] not in out_f[x]:
                    return False
            elif x not in out_f[image[other]]:
                return False
        return True

    def rec(v: int) -> int:
        if v == g.n:
            return 1
        total = 0
        for x in domain[v]:
            if ok(v, x):
                image[v] = x
                total += rec(v + 1)
        return total

    return rec(0)


def hom_count(g, f, *, budget: int = HOM_BUDGET) -> int:
    """Number of edge-preserving maps g -> f (vertex maps, not necessarily injective).

    Accepts ``Digraph``, ``InTree``, ``FunctionalGraph`` or ``(n, edges)``.
    Raises ``SizeLimit`` when |V_f| ** |V_g| exceeds ``budget``.
    """
    g, f = Digraph.of(g), Digraph.of(f)
    if f.n ** g.n > budget:
        raise SizeLimit(f"{f.n}^{g.n} maps exceed the budget {budget}")
    return _hom_search(g, f, None)


def hom_count_at_level(g, f: InTree, anchor: int, level: int, *, budget: int = HOM_BUDGET) -> int:
    """Homomorphisms g -> f sending vertex ``anchor`` of g to a node on ``level`` of f.

    Counts split by the anchor's level are multiplicative over the layerwise
    product for connected g, unlike the plain count.
    """
    gd = Digraph.of(g)
    if f.n ** gd.n > budget:
        raise SizeLimit(f"{f.n}^{gd.n} maps exceed the budget {budget}")
    allowed = [v for v in range(f.n) if f.level[v] == level]
    return _hom_search(gd, Digraph.of(f), {anchor: allowed})
