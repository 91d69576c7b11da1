"""Functional graphs: finite endofunctions stored as successor arrays."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    """Raised when a ``.fg`` document cannot be parsed."""


@dataclass(frozen=True)
class ComponentView:
    """One weakly connected component of a functional graph.

    ``cycle[r]`` is g(r) = f^r(cycle[0]); ``cycle[0]`` is the lowest-index
    cyclic node.  ``depth`` and ``height`` are indexed by parent-graph node.
    """

    nodes: tuple[int, ...]
    cycle: tuple[int, ...]
    depth: dict[int, int] = field(repr=False)
    height: dict[int, int] = field(repr=False)

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def h_max(self) -> int:
        return max((self.depth[v] for v in self.nodes), default=0)

    @property
    def transients(self) -> list[int]:
        return [v for v in self.nodes if self.depth[v] > 0]

    def row_of(self, v: int) -> int:
        return self.cycle.index(v)


class FunctionalGraph:
    """A graph in which every node has exactly one outgoing edge."""

    __slots__ = ("succ", "__dict__")

    def __init__(self, successors: Iterable[int]):
        succ = tuple(int(s) for s in successors)
        n = len(succ)
        for i, s in enumerate(succ):
            if not 0 <= s < n:
                raise ValueError(f"successor of node {i} is {s}, outside 0..{n - 1}")
        self.succ = succ

    def __len__(self) -> int:
        return len(self.succ)

    @property
    def n(self) -> int:
        return len(self.succ)

    def __repr__(self) -> str:
        return f"FunctionalGraph({list(self.succ)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FunctionalGraph):
            return NotImplemented
        return self.succ == other.succ

    def __hash__(self) -> int:
        return hash(self.succ)

    # -- structure ----------------------------------------------------------

    @cached_property
    def preds(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.succ]
        for u, v in enumerate(self.succ):
            out[v].append(u)
        return tuple(tuple(p) for p in out)

    def predecessors(self, v: int) -> set[int]:
        return set(self.preds[v])

    def indegree(self, v: int) -> int:
        return len(self.preds[v])

    @cached_property
    def is_cyclic(self) -> tuple[bool, ...]:
        # peel leaves repeatedly; survivors lie on cycles
        n = self.n
        indeg = [len(p) for p in self.preds]
        alive = [True] * n
        stack = [v for v in range(n) if indeg[v] == 0]
        while stack:
            v = stack.pop()
            alive[v] = False
            s = self.succ[v]
            indeg[s] -= 1
            if indeg[s] == 0:
                stack.append(s)
        return tuple(alive)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        n = self.n
        depth = [-1] * n
        frontier = [v for v in range(n) if self.is_cyclic[v]]
        for v in frontier:
            depth[v] = 0
        d = 0
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for u in self.preds[v]:
                    if depth[u] < 0:
                        depth[u] = d
                        nxt.append(u)
            frontier = nxt
        return tuple(depth)

    @cached_property
    def height(self) -> tuple[int, ...]:
        """Height of the in-tree of transient predecessors rooted at each node."""
        height = [0] * self.n
        order = sorted(range(self.n), key=lambda v: -self.depth[v])
        cyc = self.is_cyclic
        for v in order:
            if cyc[v]:
                continue
            s = self.succ[v]
            if height[v] + 1 > height[s]:
                height[s] = height[v] + 1
        return tuple(height)

    @cached_property
    def component_ids(self) -> tuple[int, ...]:
        """Component index per node; components numbered by lowest cyclic node."""
        n = self.n
        comp = [-1] * n
        k = 0
        for v in range(n):
            if self.is_cyclic[v] and comp[v] < 0:
                w = v
                while comp[w] < 0:
                    comp[w] = k
                    w = self.succ[w]
                k += 1
        for v in sorted(range(n), key=lambda v: self.depth[v]):
            if comp[v] < 0:
                comp[v] = comp[self.succ[v]]
        return tuple(comp)

    def components(self) -> list[ComponentView]:
        members: dict[int, list[int]] = {}
        for v, c in enumerate(self.component_ids):
            members.setdefault(c, []).append(v)
        views = []
        for c in sorted(members):
            nodes = members[c]
            start = min(v for v in nodes if self.is_cyclic[v])
            cycle = [start]
            w = self.succ[start]
            while w != start:
                cycle.append(w)
                w = self.succ[w]
            views.append(
                ComponentView(
                    nodes=tuple(nodes),
                    cycle=tuple(cycle),
                    depth={v: self.depth[v] for v in nodes},
                    height={v: self.height[v] for v in nodes},
                )
            )
        return views

    def component(self) -> ComponentView:
        """The single component of a connected graph."""
        comps = self.components()
        if len(comps) != 1:
            raise ValueError(f"expected a connected graph, found {len(comps)} components")
        return comps[0]

    def is_connected(self) -> bool:
        return self.n > 0 and max(self.component_ids) == 0

    def cycle_length(self) -> int:
        return self.component().period

    @property
    def cyclic_nodes(self) -> list[int]:
        return [v for v in range(self.n) if self.is_cyclic[v]]

    def cycle_from(self, v: int) -> list[int]:
        """Cyclic nodes in f-order starting at cyclic node ``v``."""
        if not self.is_cyclic[v]:
            raise ValueError(f"node {v} is not cyclic")
        out = [v]
        w = self.succ[v]
        while w != v:
            out.append(w)
            w = self.succ[w]
        return out

    # -- derived graphs -----------------------------------------------------

    def subgraph(self, keep: Sequence[int]) -> tuple["FunctionalGraph", dict[int, int]]:
        """Induced subgraph on a successor-closed node set, plus old->new index map."""
        index = {v: i for i, v in enumerate(keep)}
        try:
            succ = [index[self.succ[v]] for v in keep]
        except KeyError as exc:
            raise ValueError("node set is not closed under the successor map") from exc
        return FunctionalGraph(succ), index

    def truncate(self, h: int) -> "FunctionalGraph":
        if h < 0:
            raise ValueError("truncate depth must be non-negative")
        keep = [v for v in range(self.n) if self.depth[v] <= h]
        return self.subgraph(keep)[0]

    def component_graph(self, v: int) -> tuple["FunctionalGraph", dict[int, int]]:
        c = self.component_ids[v]
        keep = [u for u in range(self.n) if self.component_ids[u] == c]
        return self.subgraph(keep)

    def relabel(self, perm: Sequence[int]) -> "FunctionalGraph":
        """Graph with node ``v`` renamed ``perm[v]``."""
        succ = [0] * self.n
        for v, s in enumerate(self.succ):
            succ[perm[v]] = perm[s]
        return FunctionalGraph(succ)


def fg_sum(a: FunctionalGraph, b: FunctionalGraph) -> FunctionalGraph:
    shift = a.n
    return FunctionalGraph(list(a.succ) + [s + shift for s in b.succ])


def direct_product(a: FunctionalGraph, b: FunctionalGraph) -> FunctionalGraph:
    """Product graph; node (i, j) is linearised as ``i * |b| + j``."""
    nb = b.n
    return FunctionalGraph(
        sa * nb + sb for sa in a.succ for sb in b.succ
    )


def product_component(
    a: FunctionalGraph, b: FunctionalGraph, ua: int, ub: int
) -> tuple[FunctionalGraph, list[tuple[int, int]]]:
    """Component of ``a x b`` through the cyclic pair ``(ua, ub)``, built backwards.

    Returns the component (node 0 is ``(ua, ub)``) and the pair for each node.
    Avoids materialising the other gcd - 1 components.
    """
    if not (a.is_cyclic[ua] and b.is_cyclic[ub]):
        raise ValueError("product_component needs a cyclic pair")
    pairs = [(ua, ub)]
    index = {(ua, ub): 0}
    x, y = a.succ[ua], b.succ[ub]
    while (x, y) != (ua, ub):
        index[(x, y)] = len(pairs)
        pairs.append((x, y))
        x, y = a.succ[x], b.succ[y]
    pa, pb = a.preds, b.preds
    head = 0
    while head < len(pairs):
        x, y = pairs[head]
        head += 1
        for x2 in pa[x]:
            for y2 in pb[y]:
                if (x2, y2) not in index:
                    index[(x2, y2)] = len(pairs)
                    pairs.append((x2, y2))
    succ = [index[(a.succ[x], b.succ[y])] for x, y in pairs]
    return FunctionalGraph(succ), pairs


def cycle_graph(p: int) -> FunctionalGraph:
    return FunctionalGraph([(i + 1) % p for i in range(p)])


# -- canonical forms ----------------------------------------------------------


def tree_codes(g: FunctionalGraph) -> list[str]:
    """Sorted-children parenthesis code of the transient in-tree under each node.

    For a cyclic node the code covers only its transient predecessors.
    """
    codes: list[str] = [""] * g.n
    cyc = g.is_cyclic
    depth = g.depth
    for v in sorted(range(g.n), key=lambda v: -depth[v]):
        kids = sorted(codes[u] for u in g.preds[v] if not cyc[u])
        codes[v] = "(" + "".join(kids) + ")"
    return codes


def _min_rotation(seq: list[int]) -> list[int]:
    m = len(seq)
    best = min(range(m), key=lambda i: seq[i:] + seq[:i])
    return seq[best:] + seq[:best]


def component_codes(g: FunctionalGraph) -> list[str]:
    codes = tree_codes(g)
    out = []
    for comp in g.components():
        trees = [codes[v] for v in comp.cycle]
        ranks = {c: i for i, c in enumerate(sorted(set(trees)))}
        rot = _min_rotation([ranks[c] for c in trees])
        by_rank = sorted(ranks, key=ranks.get)
        out.append("<" + "".join(by_rank[r] for r in rot) + ">")
    return out


def canonical_form(g: FunctionalGraph) -> bytes:
    """Isomorphism-invariant code: equal codes iff the graphs are isomorphic."""
    return "".join(sorted(component_codes(g))).encode("ascii")


def is_isomorphic(a: FunctionalGraph, b: FunctionalGraph) -> bool:
    return a.n == b.n and canonical_form(a) == canonical_form(b)


# -- text formats -------------------------------------------------------------


def parse_fg(text: str) -> FunctionalGraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("empty .fg document")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise GraphFormatError(f"bad node count line: {lines[0]!r}") from exc
    if n < 0:
        raise GraphFormatError("negative node count")
    if n == 0:
        if len(lines) > 1 and lines[1]:
            raise GraphFormatError("successors given for an empty graph")
        return FunctionalGraph([])
    if len(lines) != 2:
        raise GraphFormatError("expected exactly one successor line")
    try:
        succ = [int(tok) for tok in lines[1].split()]
    except ValueError as exc:
        raise GraphFormatError(f"bad successor line: {lines[1]!r}") from exc
    if len(succ) != n:
        raise GraphFormatError(f"expected {n} successors, got {len(succ)}")
    try:
        return FunctionalGraph(succ)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def format_fg(g: FunctionalGraph, comment: str | None = None) -> str:
    head = "".join(f"# {ln}\n" for ln in comment.splitlines()) if comment else ""
    return f"{head}{g.n}\n{' '.join(map(str, g.succ))}\n"


def read_fg(path) -> FunctionalGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_fg(fh.read())


def write_fg(path, g: FunctionalGraph, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_fg(g, comment))


def to_dot(g: FunctionalGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in range(g.n):
        attrs = f'label="{v}"'
        if g.is_cyclic[v]:
            attrs += ', shape=doublecircle, xlabel="cyclic"'
        lines.append(f"  {v} [{attrs}];")
    for v, s in enumerate(g.succ):
        lines.append(f"  {v} -> {s};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def gcd_lcm(p: int, q: int) -> tuple[int, int]:
    g = gcd(p, q)
    return g, p * q // g
