"""Brute-force ground truth and seeded random instances.

``oracle_solve`` shares nothing with the solvers beyond the product and the
canonical form: it walks every successor array and keeps what works.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from functools import lru_cache
from itertools import product
from math import gcd
from pathlib import Path
from typing import Iterator

from .errors import InfeasibleSpec, SizeLimit
from .graph import FunctionalGraph, canonical_form, product_component, write_fg

MASK64 = (1 << 64) - 1
ENUM_LIMIT = 6


class SplitMix64:
    """splitmix64 (Steele, Lea, Flood); identical streams on every platform."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


@dataclass(frozen=True)
class InstanceSpec:
    n_a: int
    n_x: int
    p_a: int
    p_x: int
    max_indegree: int
    seed: int
    height: int | None = None

    def __post_init__(self):
        if not (1 <= self.p_a <= self.n_a and 1 <= self.p_x <= self.n_x):
            raise InfeasibleSpec("cycle lengths must satisfy 1 <= p <= n")
        if self.max_indegree < 1:
            raise InfeasibleSpec("max_indegree must be at least 1")


def random_connected_fg(
    n: int, p: int, max_indegree: int, rng: SplitMix64, height: int | None = None
) -> FunctionalGraph:
    """Cycle 0..p-1, then each new node hangs off a uniformly chosen eligible node.

    Eligible: indegree (cyclic predecessor included) below the cap and, if
    ``height`` is given, depth below it.
    """
    succ = [(r + 1) % p for r in range(p)]
    indeg = [1] * p
    depth = [0] * p
    for k in range(p, n):
        eligible = [
            v for v in range(k)
            if indeg[v] < max_indegree and (height is None or depth[v] < height)
        ]
        if not eligible:
            raise InfeasibleSpec(f"no eligible parent for node {k} (cap {max_indegree})")
        parent = eligible[rng.below(len(eligible))]
        succ.append(parent)
        indeg[parent] += 1
        indeg.append(0)
        depth.append(depth[parent] + 1)
    return FunctionalGraph(succ)


def gen_instance(spec: InstanceSpec) -> tuple[FunctionalGraph, FunctionalGraph, FunctionalGraph]:
    """(A, X, B) with B the component of A x X through (0, 0)."""
    rng = SplitMix64(spec.seed)
    a = random_connected_fg(spec.n_a, spec.p_a, spec.max_indegree, rng, spec.height)
    x = random_connected_fg(spec.n_x, spec.p_x, spec.max_indegree, rng, spec.height)
    b, _ = product_component(a, x, 0, 0)
    return a, x, b


def enumerate_fgs(
    n: int,
    *,
    connected: bool = False,
    cycle_length: int | None = None,
    dedupe: bool = False,
) -> Iterator[FunctionalGraph]:
    """Every successor array on ``n`` nodes, optionally filtered and up to isomorphism."""
    if n > ENUM_LIMIT:
        raise SizeLimit(f"{n}^{n} arrays exceed the enumeration budget")
    seen: set[bytes] = set()
    for succ in product(range(n), repeat=n):
        g = FunctionalGraph(succ)
        if connected and not g.is_connected():
            continue
        if cycle_length is not None and (
            not g.is_connected() or g.cycle_length() != cycle_length
        ):
            continue
        if dedupe:
            code = canonical_form(g)
            if code in seen:
                continue
            seen.add(code)
        yield g


def connected_with_cycle(n: int, p: int) -> Iterator[FunctionalGraph]:
    """Connected graphs on n nodes whose cycle is 0 -> 1 -> ... -> p-1 -> 0.

    Every connected graph with cycle length p is isomorphic to one of these.
    """
    cycle = [(r + 1) % p for r in range(p)]
    for tail in product(range(n), repeat=n - p):
        g = FunctionalGraph(cycle + list(tail))
        if g.is_connected() and g.cycle_length() == p:
            yield g


@lru_cache(maxsize=None)
def _classes(n: int, p: int) -> tuple[tuple[bytes, FunctionalGraph], ...]:
    out: dict[bytes, FunctionalGraph] = {}
    for x in connected_with_cycle(n, p):
        out.setdefault(canonical_form(x), x)
    return tuple(out.items())


def oracle_solve(
    a: FunctionalGraph,
    b: FunctionalGraph,
    max_n_x: int,
    *,
    periods: list[int] | None = None,
    limit: int = ENUM_LIMIT,
) -> list[FunctionalGraph]:
    """All connected X, |X| <= max_n_x, with a component of A x X isomorphic to B.

    Sizes are also capped by |B| * p_x / p_B, since each component of A x X
    holds |X| * p_B / p_x nodes whose A factor is cyclic.  ``periods``
    restricts the cycle lengths tried; ``limit`` raises the node cap for
    callers that accept the n^(n - p_x) cost.
    """
    if max_n_x > limit:
        raise SizeLimit(f"max_n_x={max_n_x} exceeds the enumeration budget")
    if not (a.is_connected() and b.is_connected()):
        raise ValueError("A and B must be connected")
    p_a, p_b = a.cycle_length(), b.cycle_length()
    target = canonical_form(b)
    a_cyc = a.component().cycle
    found: dict[bytes, FunctionalGraph] = {}
    for p_x in range(1, p_b + 1):
        if p_a * p_x // gcd(p_a, p_x) != p_b:
            continue
        if periods is not None and p_x not in periods:
            continue
        top = min(max_n_x, b.n * p_x // p_b)
        for n in range(p_x, top + 1):
            for code, x in _classes(n, p_x):
                for i in range(gcd(p_a, p_x)):
                    comp, _ = product_component(a, x, a_cyc[i], 0)
                    if comp.n == b.n and canonical_form(comp) == target:
                        found[code] = x
                        break
    return list(found.values())


# -- serialisation ------------------------------------------------------------


def write_instance(directory, name: str, spec: InstanceSpec, a, x, b) -> None:
    """Write ``name.A.fg``, ``name.X.fg``, ``name.B.fg`` and append to ``manifest.jsonl``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for tag, g in (("A", a), ("X", x), ("B", b)):
        write_fg(d / f"{name}.{tag}.fg", g, comment=f"{name} {tag}")
    with open(d / "manifest.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps({"name": name, **asdict(spec)}, sort_keys=True) + "\n")


def read_manifest(directory) -> list[tuple[str, InstanceSpec]]:
    out = []
    with open(Path(directory) / "manifest.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                name = rec.pop("name")
                out.append((name, InstanceSpec(**rec)))
    return out
