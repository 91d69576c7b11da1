"""Reconstruct the graphs X with A x X >= B (connected A, X, B).

The exact solver grows X layer by layer.  Layers 1 and 2 follow directly
from the t-abstraction of X.  From layer 3 on, every transient node of B is
labelled with an *origin*: the node of X that generated it, or -1 when it
comes from a deeper layer of A against a shallower layer of X.  Knowing the
origins of layer h - 2 of B splits each cell of T^B by origin, and each part
is divided by M1 on its own, which pins down X's next layer without
ambiguity.  Origins of the new layer are then chosen by backtracking over
the nodes of B with matching indegrees.

The naive solver instead tries every wiring of every abstraction solution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .errors import SolverTimeout
from .graph import FunctionalGraph, canonical_form, product_component, tree_codes
from .multiset import Multiset, MultisetError, ms_division
from .solver_abstraction import solve_abstraction
from .tabstraction import TAbstraction, layer_matrix, lower_layers, t_abstraction

MINUS_ONE = -1
INF = float("inf")


@dataclass(frozen=True)
class GraphSolution:
    alignment: int
    x: FunctionalGraph


@dataclass
class SearchStats:
    explored_assignments: int = 0
    backtracks: int = 0
    candidates_tested: int = 0


@dataclass
class SolveResult:
    solutions: list[GraphSolution]
    stats: SearchStats = field(default_factory=SearchStats)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)


# -- helpers ------------------------------------------------------------------


def unroll_level(g: FunctionalGraph, v: int, k: int) -> list[int]:
    """Nodes u with f^k(u) = v reached by backward walks of length k from cyclic v."""
    level = [v]
    for _ in range(k):
        level = [u for w in level for u in g.preds[w]]
    return level


class _Deadline:
    __slots__ = ("at", "ticks")

    def __init__(self, at: float | None):
        self.at = at
        self.ticks = 0

    def check(self) -> None:
        if self.at is None:
            return
        self.ticks += 1
        if self.ticks & 63 == 0 and time.monotonic() > self.at:
            raise SolverTimeout("graph solver timed out")

    def check_now(self) -> None:
        if self.at is not None and time.monotonic() > self.at:
            raise SolverTimeout("graph solver timed out")


class _Fail(Exception):
    pass


# -- the partially built X ----------------------------------------------------


class _PartialX:
    """X under construction; node labels are creation indices."""

    def __init__(self, p_x: int):
        self.succ = [(r + 1) % p_x for r in range(p_x)]
        self.depth = [0] * p_x
        self.row = list(range(p_x))  # row of the cyclic node each node hangs over
        self.children: list[list[int]] = [[] for _ in range(p_x)]

    def copy(self) -> "_PartialX":
        other = _PartialX.__new__(_PartialX)
        other.succ = list(self.succ)
        other.depth = list(self.depth)
        other.row = list(self.row)
        other.children = [list(c) for c in self.children]
        return other

    def add(self, parent: int) -> int:
        k = len(self.succ)
        self.succ.append(parent)
        self.depth.append(self.depth[parent] + 1)
        self.row.append(self.row[parent])
        self.children.append([])
        self.children[parent].append(k)
        return k

    def attach(self, nodes: list[int], degrees: Multiset) -> bool:
        """Give ``nodes`` (label order) the degrees in descending order; True if any node was created."""
        created = False
        for v, d in zip(nodes, sorted(degrees, reverse=True)):
            for _ in range(d):
                self.add(v)
                created = True
        return created

    def graph(self) -> FunctionalGraph:
        return FunctionalGraph(self.succ)


# -- origin assignment enumeration -------------------------------------------


@dataclass
class OriginConstraint:
    """One group of B nodes sharing a parent origin.

    ``slots`` lists (label, required indegree, A node) triples; ``candidates``
    are the B nodes the labels must be spread over.
    """

    slots: list[tuple[int, int, int]]
    candidates: list[int]


def _height_feasible(label: int, ws: tuple[int, ...], us: list[int], ctx) -> bool:
    hb, ha, a_cyc = ctx
    if label == MINUS_ONE:
        return sorted(hb[w] for w in ws) == sorted(ha[u] for u in us)
    w_heights = sorted((hb[w] for w in ws), reverse=True)
    limits = sorted((INF if a_cyc[u] else ha[u] for u in us), reverse=True)
    return all(hw <= lim for hw, lim in zip(w_heights, limits))


_CONFLICT = object()


def _merge_level(a, b):
    # a level is a Multiset (known), an int (only its size known) or None (free)
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, int) and isinstance(b, int):
        return a if a == b else _CONFLICT
    if isinstance(a, int):
        return b if len(b) == a else _CONFLICT
    if isinstance(b, int):
        return a if len(a) == b else _CONFLICT
    return a if a == b else _CONFLICT


def _merge_signature(a: tuple, b: tuple):
    out = []
    for x, y in zip(a, b):
        m = _merge_level(x, y)
        if m is _CONFLICT:
            return None
        out.append(m)
    return tuple(out)


def _meet(cur, qs):
    """Signatures compatible with both sets; None stands for no constraint."""
    if cur is None:
        return qs
    if qs is None:
        return cur
    if cur == qs:
        return cur
    out = set()
    for a in cur:
        for b in qs:
            m = _merge_signature(a, b)
            if m is not None:
                out.add(m)
    return frozenset(out)


def _pick(cands: list[int], k: int, key, qsets, inter, deadline=None):
    """k-subsets of ``cands`` with the running quotient intersection they leave.

    Nodes sharing ``key`` are interchangeable, so only prefixes of each key
    group are taken.  ``qsets(w)`` is None (no constraint) or the set of
    quotients node w allows; the chosen nodes must share one.
    """
    groups: dict = {}
    for w in cands:
        groups.setdefault(w if key is None else key(w), []).append(w)
    members, sets = [], []
    for m in groups.values():
        qs = None if qsets is None else qsets(m[0])
        if qs is not None and not _meet(inter, qs):
            continue
        members.append(m)
        sets.append(qs)
    room = [0] * (len(members) + 1)
    for j in range(len(members) - 1, -1, -1):
        room[j] = room[j + 1] + len(members[j])

    def enough(j: int, left: int, cur) -> bool:
        if cur is None:
            return True
        # some single signature must still be shared by ``left`` more nodes
        for sig in cur:
            one = frozenset((sig,))
            got = 0
            for jj in range(j, len(members)):
                if sets[jj] is None or _meet(one, sets[jj]):
                    got += len(members[jj])
                    if got >= left:
                        return True
        return False

    def rec(j: int, left: int, acc: list[int], cur):
        if deadline is not None:
            deadline.check()
        if left == 0:
            yield tuple(sorted(acc)), cur
            return
        if room[j] < left or not enough(j, left, cur):
            return
        group, qs = members[j], sets[j]
        for c in range(min(left, len(group)), -1, -1):
            nxt = cur
            if c and qs is not None:
                nxt = _meet(cur, qs)
                if not nxt:
                    continue
            acc.extend(group[:c])
            yield from rec(j + 1, left - c, acc, nxt)
            del acc[len(acc) - c:]

    yield from rec(0, k, [], inter)


def enumerate_assignments(
    constraints: list[OriginConstraint],
    indegree,
    *,
    heights=None,
    height_pruning: bool = False,
    lookahead=None,
    symmetry=None,
    quotients=None,
    anchor=None,
    slot_type=None,
    deadline: _Deadline | None = None,
) -> Iterator[dict[int, int]]:
    """Lazily yield every origin assignment satisfying all constraints.

    ``indegree`` maps a B node to its indegree.  With ``height_pruning``,
    ``heights = (H_B, H_A, A.is_cyclic)`` enables the subtree-height filter.
    The remaining hooks only cut branches that cannot succeed:

    * ``lookahead(label, nodes)`` may reject a label's full node set;
    * ``symmetry(w)`` maps B nodes to keys such that nodes sharing a key are
      swapped by an automorphism of B fixing every origin chosen so far;
    * ``quotients(label, w, us)`` gives the degree multisets of the label's
      children compatible with w (None for no constraint); a label's nodes
      must agree on one;
    * ``anchor(label, {degree: us})`` may name one slot ``(degree, u)`` to
      fill first, alone, so that its node fixes the label's signature;
    * ``slot_type(u)`` splits a class into kinds of interchangeable A nodes,
      each filled separately so that nodes are matched to distinct slots.

    Zero-indegree classes are filled greedily; they cannot influence higher
    layers.  Order: constraints as given, labels ascending, indegree classes
    ascending, candidate subsets in lexicographic order.
    """
    steps = []  # (pool key, label, us, opens_label, closes_label)
    pools: dict[tuple[int, int], list[int]] = {}
    fixed: dict[int, int] = {}
    for ci, con in enumerate(constraints):
        by_label: dict[int, dict[int, list[int]]] = {}
        need: dict[int, int] = {}
        for label, deg, u in con.slots:
            by_label.setdefault(label, {}).setdefault(deg, []).append(u)
            need[deg] = need.get(deg, 0) + 1
        have: dict[int, list[int]] = {}
        for w in sorted(con.candidates):
            have.setdefault(indegree(w), []).append(w)
        if {d: len(ws) for d, ws in have.items()} != need:
            return
        zeros = iter(have.get(0, []))
        for label in sorted(by_label):
            degs = sorted(by_label[label])
            positive = [d for d in degs if d > 0]
            for d in degs:
                if d == 0:
                    for _ in by_label[label][0]:
                        fixed[next(zeros)] = label
            first = anchor(label, by_label[label]) if anchor is not None else None
            plan = []
            for d in positive:
                us = by_label[label][d]
                if slot_type is None:
                    plan.append((d, us))
                    continue
                kinds: dict = {}
                for u in us:
                    kinds.setdefault(slot_type(u), []).append(u)
                plan.extend((d, group) for group in kinds.values())
            if first is not None and first[0] > 0:
                d0, u0 = first
                head = [(d0, [u0])]
                for d, us in plan:
                    if d == d0 and u0 in us:
                        us = [u for u in us if u != u0]
                    if us:
                        head.append((d, us))
                plan = head
            for k, (d, us) in enumerate(plan):
                pools[(ci, d)] = have[d]
                steps.append(((ci, d), label, us, k == 0, k == len(plan) - 1))

    used: set[int] = set()
    acc = dict(fixed)
    current: list[int] = []  # positive-indegree nodes of the label being filled

    def rec(k: int, inter) -> Iterator[dict[int, int]]:
        if deadline is not None:
            deadline.check()
        if k == len(steps):
            yield dict(acc)
            return
        key, label, us, opens, closes = steps[k]
        if opens:
            inter = None
        cands = [w for w in pools[key] if w not in used]
        qsets = None if quotients is None else (lambda w: quotients(label, w, us))
        mark = len(current)
        for chosen, nxt in _pick(cands, len(us), symmetry, qsets, inter, deadline):
            if height_pruning and not _height_feasible(label, chosen, us, heights):
                continue
            current.extend(chosen)
            if closes and lookahead is not None and not lookahead(label, current):
                del current[mark:]
                continue
            used.update(chosen)
            for w in chosen:
                acc[w] = label
            if closes:
                saved = current[:]
                del current[:]
                yield from rec(k + 1, None)
                current[:] = saved
            else:
                yield from rec(k + 1, nxt)
            for w in chosen:
                del acc[w]
            used.difference_update(chosen)
            del current[mark:]

    yield from rec(0, None)


def height_filter(h_w: int, h_u: int, u_cyclic: bool, minus_one: bool = False) -> bool:
    """Can B node w (height h_w) be generated from A node u under this origin kind?

    X-origins need H(w) <= H(u) when u is transient; -1 origins (cyclic X
    factor) need H(w) == H(u).  Cyclic u is never pruned.
    """
    if u_cyclic:
        return True
    return h_w == h_u if minus_one else h_w <= h_u


# -- the exact solver ---------------------------------------------------------


class _AlignmentSearch:
    def __init__(self, A, B, p_x, i, tx, opts, stats, deadline):
        self.A, self.B, self.p_x, self.i, self.tx = A, B, p_x, i, tx
        self.prune = opts["height_pruning"]
        self.propagate = opts.get("propagate", True)
        self.stats = stats
        self.deadline = deadline
        comp_a = A.component()
        comp_b = B.component()
        self.a_cycle = comp_a.cycle
        self.p_a = len(self.a_cycle)
        self.b_cycle = comp_b.cycle
        self.ta = t_abstraction(A, comp_a)
        self.lm_b = layer_matrix(B, comp_b)
        self.b_code = canonical_form(B)
        self.h_b = comp_b.h_max
        self.heights = (B.height, A.height, A.is_cyclic)
        self._m1_cache: dict[tuple[int, int], list[int]] = {}
        self._m1_ms: dict[tuple[int, int], Multiset] = {}
        self._sig_cache: dict = {}
        self._lev_a: dict[int, list[Multiset]] = {}
        self._lev_b: dict[int, list[Multiset]] = {}
        self._slot_kind: dict[int, tuple] = {}
        self.b_row = {
            w: r for r in range(self.lm_b.p) for h in range(1, self.h_b + 1) for w in self.lm_b.cell(r, h)
        }
        codes = tree_codes(B)
        self.sym_key = (lambda w: (B.succ[w], codes[w])) if opts["symmetry"] else None
        self._trunc_a: dict[int, FunctionalGraph] = {}
        self._trunc_b: dict[int, bytes] = {}

    def a_row(self, r: int) -> int:
        return self.a_cycle[(r + self.i) % self.p_a]

    def m1_nodes(self, r: int, h: int) -> list[int]:
        key = (r, h)
        if key not in self._m1_cache:
            self._m1_cache[key] = unroll_level(self.A, self.a_row(r), h - 1)
        return self._m1_cache[key]

    def m1(self, r: int, h: int) -> Multiset:
        key = (r, h)
        if key not in self._m1_ms:
            self._m1_ms[key] = Multiset(self.A.indegree(u) for u in self.m1_nodes(r, h))
        return self._m1_ms[key]

    # -- verification -------------------------------------------------------

    def truncated_ok(self, X: _PartialX, h: int) -> bool:
        if h not in self._trunc_a:
            self._trunc_a[h] = self.A.truncate(h)
            self._trunc_b[h] = canonical_form(self.B.truncate(h))
        # truncate keeps node order, so the cyclic A node keeps its relative index
        ta = self._trunc_a[h]
        a_idx = sorted(v for v in range(self.A.n) if self.A.depth[v] <= h).index(self.a_cycle[self.i])
        comp, _ = product_component(ta, X.graph(), a_idx, 0)
        return canonical_form(comp) == self._trunc_b[h]

    def full_ok(self, X: _PartialX) -> bool:
        comp, _ = product_component(self.A, X.graph(), self.a_cycle[self.i], 0)
        return comp.n == self.B.n and canonical_form(comp) == self.b_code

    # -- layers -------------------------------------------------------------

    def layer1(self) -> _PartialX:
        X = _PartialX(self.p_x)
        for r in range(self.p_x):
            (d,) = list(self.tx.cell(r, 1))
            for _ in range(d - 1):
                X.add(r)
        return X

    def layer2(self, X: _PartialX) -> bool:
        created = False
        for r in range(self.p_x):
            nodes = [v for v in X.children[r] if X.depth[v] == 1]
            created |= X.attach(nodes, self.tx.cell(r, 2))
        return created

    def layer(self, X: _PartialX, origins: dict[int, int], h: int) -> bool:
        """Build X's layer h from origins of B's layer h - 2 (h >= 3)."""
        B = self.B
        created = False
        for r in range(self.p_x):
            m1 = self.m1(r, h)
            groups: dict[int, list[int]] = {}
            for w in self.lm_b.cell(r, h - 1):
                groups.setdefault(origins[B.succ[w]], []).append(w)
            minus = Multiset(B.indegree(w) for w in groups.pop(MINUS_ONE, []))
            m2 = self.ta.cell(r + self.i, h) * lower_layers(self._tx_so_far, r, h)
            if minus != m2:
                raise _Fail(f"-1 part of B[{r},{h}] differs from M2")
            parents = sorted(v for v in range(len(X.succ)) if X.row[v] == r and X.depth[v] == h - 2)
            for o in parents:
                part = Multiset(B.indegree(w) for w in groups.pop(o, []))
                try:
                    q = ms_division(part, m1)
                except MultisetError as exc:
                    raise _Fail(str(exc)) from exc
                kids = X.children[o]
                if len(q) != len(kids):
                    raise _Fail(f"origin {o}: {len(q)} degrees for {len(kids)} nodes")
                created |= X.attach(kids, q)
            if groups:
                raise _Fail("B nodes under origins that do not exist in X")
        return created

    def constraints(self, X: _PartialX, origins: dict[int, int], h: int) -> list[OriginConstraint]:
        """Constraints for origins of B's layer h - 1 once X's layer h exists."""
        B, A = self.B, self.A
        out = []
        for r in range(self.p_x):
            us = self.m1_nodes(r, h)
            if h == 2:
                slots = []
                for v in X.children[r]:
                    if X.depth[v] != 1:
                        continue
                    d = len(X.children[v])
                    slots.extend((v, d * A.indegree(u), u) for u in us)
                a_r = self.a_row(r)
                x_prev = self.tx.cell(r - 1, 1).max()
                for u in A.preds[a_r]:
                    if not A.is_cyclic[u]:
                        slots.append((MINUS_ONE, A.indegree(u) * x_prev, u))
                out.append(OriginConstraint(slots, sorted(self.lm_b.cell(r, 1))))
                continue
            groups: dict[int, list[int]] = {}
            for w in self.lm_b.cell(r, h - 1):
                groups.setdefault(origins[B.succ[w]], []).append(w)
            parents = sorted(v for v in range(len(X.succ)) if X.row[v] == r and X.depth[v] == h - 2)
            for o in parents:
                slots = []
                for v in X.children[o]:
                    d = len(X.children[v])
                    slots.extend((v, d * A.indegree(u), u) for u in us)
                out.append(OriginConstraint(slots, sorted(groups.get(o, []))))
        return out

    def forced_minus_one(self, origins: dict[int, int], h: int) -> dict[int, int]:
        out = {}
        if h < 3:
            return out
        for r in range(self.p_x):
            for w in self.lm_b.cell(r, h - 1):
                if origins[self.B.succ[w]] == MINUS_ONE:
                    out[w] = MINUS_ONE
        return out

    # -- search -------------------------------------------------------------

    def run(self) -> FunctionalGraph | None:
        X = self.layer1()
        self._tx_so_far = self.tx
        if not self.truncated_ok(X, 1):
            return None
        if len(X.succ) == self.p_x:
            return X.graph() if self.full_ok(X) else None
        X2 = X.copy()
        created = self.layer2(X2)
        if not self.truncated_ok(X2, 2):
            return None
        if not created:
            return X2.graph() if self.full_ok(X2) else None
        origins = {b: v % self.p_x for v, b in enumerate(self.b_cycle)}
        return self.descend(X2, origins, 2)

    def lookahead(self, X: _PartialX, h: int):
        """Reject a label whose B nodes' children cannot be divided into its children's degrees."""
        B = self.B

        def check(label: int, nodes: list[int]) -> bool:
            if label == MINUS_ONE:
                return True
            part = Multiset(B.indegree(c) for w in nodes for c in B.preds[w])
            try:
                q = ms_division(part, self.m1(X.row[label], h + 1))
            except MultisetError:
                return False
            return len(q) == len(X.children[label])

        return check

    def quotients(self, X: _PartialX):
        """Level signatures of the X subtree a label may carry, seen from B node w.

        Level k below w = (v, u) has indegrees L_k(v) (x) L_k(u), L_k(u)
        taken in the unroll of A from u, so each u yields one candidate
        signature (L_1(v), L_2(v), ...) by division.
        """

        def q(label: int, w: int, us: list[int]):
            if label == MINUS_ONE:
                return None if any(self._minus_one_fits(w, u) for u in us) else frozenset()
            d_v = len(X.children[label])
            out = set()
            for u in us:
                key = (w, u, d_v)
                if key not in self._sig_cache:
                    self._sig_cache[key] = self._signature(w, u, d_v)
                sig = self._sig_cache[key]
                if sig is not None:
                    out.add(sig)
            return frozenset(out)

        return q

    def slot_type(self, u: int):
        key = self._slot_kind.get(u)
        if key is None:
            A = self.A
            key = (A.is_cyclic[u], A.height[u], tuple(self._levels_a(u)), tuple(self._levels_tree(u)))
            self._slot_kind[u] = key
        return key

    def anchor(self, label: int, by_degree: dict[int, list[int]]):
        """The slot paired with A's cyclic node: its signature has no free level."""
        if label == MINUS_ONE:
            return None
        cyc = self.A.is_cyclic
        for d, us in by_degree.items():
            for u in us:
                if cyc[u]:
                    return d, u
        return None

    def _x_unroll_levels(self, c: int) -> list[Multiset]:
        """Level indegrees of X's unroll from cyclic row c, read off T^X."""
        key = ("x", c)
        got = self._lev_a.get(key)
        if got is None:
            tx = self.tx
            got = []
            for k in range(1, self.h_b + 1):
                parts = [tx.cell(c - k, 1)]
                parts.extend(tx.cell(c - k + j, j + 1) for j in range(1, k + 1))
                got.append(sum(parts[1:], parts[0]))
            self._lev_a[key] = got
        return got

    def _minus_one_fits(self, w: int, u: int) -> bool:
        """B node w as (u, x_c), x_c the cyclic X node one step behind w's row."""
        c = self.b_row[w] - 1
        levels_x = self._x_unroll_levels(c)
        for lw, la, lx in zip(self._levels_b(w), self._levels_tree(u), levels_x):
            if lw != la * lx:
                return False
        return True

    def _levels_tree(self, u: int) -> list[Multiset]:
        """Level indegrees of A's transient tree above u (no cyclic nodes)."""
        key = ("t", u)
        got = self._lev_a.get(key)
        if got is None:
            A = self.A
            got, layer = [], [u]
            for _ in range(self.h_b):
                layer = [c for t in layer for c in A.preds[t] if not A.is_cyclic[c]]
                got.append(Multiset(A.indegree(c) for c in layer))
            self._lev_a[key] = got
        return got

    def _levels_b(self, w: int) -> list[Multiset]:
        got = self._lev_b.get(w)
        if got is None:
            got, layer = [], [w]
            B = self.B
            for _ in range(self.h_b):
                layer = [c for t in layer for c in B.preds[t]]
                got.append(Multiset(B.indegree(c) for c in layer))
            self._lev_b[w] = got
        return got

    def _levels_a(self, u: int) -> list[Multiset]:
        got = self._lev_a.get(u)
        if got is None:
            got, layer = [], [u]
            A = self.A
            for _ in range(self.h_b):
                layer = [c for t in layer for c in A.preds[t]]
                got.append(Multiset(A.indegree(c) for c in layer))
            self._lev_a[u] = got
        return got

    def _signature(self, w: int, u: int, d_v: int):
        sig = []
        for k, (lw, lu) in enumerate(zip(self._levels_b(w), self._levels_a(u))):
            if not lu:
                if lw:
                    return None
                level = None
            elif lu.max() == 0:
                if lw and lw.max() != 0 or len(lw) % len(lu):
                    return None
                level = len(lw) // len(lu)
            else:
                try:
                    level = ms_division(lw, lu)
                except MultisetError:
                    return None
            if k == 0 and level is not None:
                if (level if isinstance(level, int) else len(level)) != d_v:
                    return None
            sig.append(level)
        return tuple(sig)

    def descend(self, X: _PartialX, origins: dict[int, int], h: int) -> FunctionalGraph | None:
        """X has layers <= h; choose origins for B's layer h - 1 and go up."""
        cons = self.constraints(X, origins, h)
        forced = self.forced_minus_one(origins, h)
        stream = enumerate_assignments(
            cons,
            self.B.indegree,
            heights=self.heights,
            height_pruning=self.prune,
            lookahead=self.lookahead(X, h) if self.propagate else None,
            symmetry=self.sym_key,
            quotients=self.quotients(X) if self.propagate else None,
            anchor=self.anchor if self.propagate else None,
            slot_type=self.slot_type if self.propagate else None,
            deadline=self.deadline,
        )
        for assignment in stream:
            self.stats.explored_assignments += 1
            self.deadline.check_now()
            layer_origins = dict(origins)
            layer_origins.update(forced)
            layer_origins.update(assignment)
            X_next = X.copy()
            try:
                created = self.layer(X_next, layer_origins, h + 1)
            except _Fail:
                self.stats.backtracks += 1
                continue
            if not self.truncated_ok(X_next, h + 1):
                self.stats.backtracks += 1
                continue
            if not created:
                if self.full_ok(X_next):
                    return X_next.graph()
                self.stats.backtracks += 1
                continue
            found = self.descend(X_next, layer_origins, h + 1)
            if found is not None:
                return found
            self.stats.backtracks += 1
        return None


def _check_inputs(A: FunctionalGraph, B: FunctionalGraph, p_x: int) -> None:
    from math import gcd

    if not A.is_connected() or not B.is_connected():
        raise ValueError("A and B must be connected functional graphs")
    p_a, p_b = A.cycle_length(), B.cycle_length()
    if p_x < 1 or p_a * p_x // gcd(p_a, p_x) != p_b:
        raise ValueError(f"lcm({p_a}, {p_x}) != {p_b}")


def solve_graph(
    A: FunctionalGraph,
    B: FunctionalGraph,
    p_x: int,
    *,
    height_pruning: bool = True,
    first_only: bool = False,
    symmetry: bool = True,
    propagate: bool = True,
    timeout: float | None = None,
) -> SolveResult:
    """All connected X (up to isomorphism) with cycle length ``p_x`` and A x X >= B.

    One X per alignment at most; results are in ascending alignment order and
    deduplicated by canonical form.  ``symmetry`` skips origin choices that
    differ only by swapping isomorphic sibling subtrees of B.  ``propagate``
    filters each candidate by the level profile of its whole subtree, which
    rejects most wrong origins before they are tried; turning it off (and
    ``symmetry`` too) leaves the bare origin search with optional height
    pruning.  ``timeout`` is in seconds and raises ``SolverTimeout``.
    """
    _check_inputs(A, B, p_x)
    deadline = _Deadline(None if timeout is None else time.monotonic() + timeout)
    stats = SearchStats()
    ta, tb = t_abstraction(A), t_abstraction(B)
    abstractions = solve_abstraction(ta, tb, p_x, deadline=deadline.at)
    opts = {"height_pruning": height_pruning, "symmetry": symmetry, "propagate": propagate}
    seen: set[bytes] = set()
    out = []
    for sol in abstractions:
        search = _AlignmentSearch(A, B, p_x, sol.alignment, sol.tx, opts, stats, deadline)
        x = search.run()
        if x is None:
            continue
        code = canonical_form(x)
        if code not in seen:
            seen.add(code)
            out.append(GraphSolution(sol.alignment, x))
        if first_only:
            break
    return SolveResult(out, stats)


# -- naive reconstruction -----------------------------------------------------


def distinct_permutations(values: list[int]) -> Iterator[tuple[int, ...]]:
    counts: dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    keys = sorted(counts)
    n = len(values)
    cur: list[int] = []

    def rec():
        if len(cur) == n:
            yield tuple(cur)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                cur.append(k)
                yield from rec()
                cur.pop()
                counts[k] += 1

    yield from rec()


def wirings(tx: TAbstraction, deadline: _Deadline | None = None) -> Iterator[FunctionalGraph]:
    """Every labelled graph with t-abstraction ``tx`` (rows anchored at node r)."""
    p = tx.p
    base = _PartialX(p)
    for r in range(p):
        (d,) = list(tx.cell(r, 1))
        for _ in range(d - 1):
            base.add(r)
    cells = [(r, h) for h in range(2, tx.width + 1) for r in range(p)]

    def rec(k: int, X: _PartialX):
        if deadline is not None:
            deadline.check()
        if k == len(cells):
            yield X.graph()
            return
        r, h = cells[k]
        nodes = [v for v in range(len(X.succ)) if X.row[v] == r and X.depth[v] == h - 1]
        values = list(tx.cell(r, h))
        if len(values) != len(nodes):
            return
        for perm in distinct_permutations(values):
            X2 = X.copy()
            for v, d in zip(nodes, perm):
                for _ in range(d):
                    X2.add(v)
            yield from rec(k + 1, X2)

    yield from rec(0, base)


def solve_graph_naive(
    A: FunctionalGraph,
    B: FunctionalGraph,
    p_x: int,
    *,
    first_only: bool = False,
    timeout: float | None = None,
) -> SolveResult:
    """Reference solver: test every wiring of every abstraction solution."""
    _check_inputs(A, B, p_x)
    deadline = _Deadline(None if timeout is None else time.monotonic() + timeout)
    stats = SearchStats()
    ta, tb = t_abstraction(A), t_abstraction(B)
    a_cycle = A.component().cycle
    b_code = canonical_form(B)
    seen: set[bytes] = set()
    out = []
    for sol in solve_abstraction(ta, tb, p_x, deadline=deadline.at):
        tried: set[bytes] = set()
        for x in wirings(sol.tx, deadline):
            code = canonical_form(x)
            if code in tried:
                continue
            tried.add(code)
            stats.candidates_tested += 1
            comp, _ = product_component(A, x, a_cycle[sol.alignment], 0)
            if comp.n == B.n and canonical_form(comp) == b_code:
                if code not in seen:
                    seen.add(code)
                    out.append(GraphSolution(sol.alignment, x))
                break
        if first_only and out:
            break
    stats.explored_assignments = stats.candidates_tested
    return SolveResult(out, stats)


def layer_two_assignments(
    A: FunctionalGraph,
    B: FunctionalGraph,
    p_x: int,
    alignment: int = 0,
    *,
    height_pruning: bool = True,
) -> list[dict[int, int]]:
    """Every origin assignment of B's first transient layer, before any verification.

    Useful to inspect the branching the search faces right after X's second layer.
    """
    _check_inputs(A, B, p_x)
    ta, tb = t_abstraction(A), t_abstraction(B)
    sols = {s.alignment: s.tx for s in solve_abstraction(ta, tb, p_x)}
    if alignment not in sols:
        return []
    search = _AlignmentSearch(
        A, B, p_x, alignment, sols[alignment], {"height_pruning": height_pruning, "symmetry": False},
        SearchStats(), _Deadline(None),
    )
    X = search.layer1()
    search.layer2(X)
    cons = search.constraints(X, {}, 2)
    return list(
        enumerate_assignments(
            cons, B.indegree, heights=search.heights, height_pruning=height_pruning
        )
    )
