"""Multisets of non-negative integers.

The t-abstraction calculus works on multisets of indegrees: ``+`` is the
multiplicity-wise union, ``-`` the multiplicity-wise difference (only defined
on inclusion) and ``*`` the multiset of all pairwise products.  ``divide``
recovers ``q`` from ``q * m1`` by repeated max-ratio extraction.
"""

from __future__ import annotations

import heapq
from collections import Counter
from typing import Iterable, Iterator, Mapping


class MultisetError(ArithmeticError):
    """Base class for multiset arithmetic failures."""


class NotIncluded(MultisetError):
    """Raised when subtracting a multiset that is not included in the minuend."""


class NotDivisible(MultisetError):
    """Raised when ``divide`` cannot find an exact quotient."""


class Multiset:
    """Immutable multiset of non-negative integers.

    Stored as a value -> multiplicity mapping with no zero multiplicities.
    """

    __slots__ = ("_counts", "_size", "_hash")

    def __init__(self, values: Iterable[int] = ()):
        counts: dict[int, int] = {}
        for v in values:
            v = int(v)
            if v < 0:
                raise ValueError(f"multiset values must be non-negative, got {v}")
            counts[v] = counts.get(v, 0) + 1
        self._counts = counts
        self._size = sum(counts.values())
        self._hash = None

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "Multiset":
        ms = cls.__new__(cls)
        clean = {}
        for v, c in counts.items():
            if c < 0 or v < 0:
                raise ValueError("negative value or multiplicity")
            if c:
                clean[int(v)] = int(c)
        ms._counts = clean
        ms._size = sum(clean.values())
        ms._hash = None
        return ms

    # -- container protocol -------------------------------------------------

    @property
    def counts(self) -> Mapping[int, int]:
        return dict(self._counts)

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[int]:
        for v in sorted(self._counts):
            for _ in range(self._counts[v]):
                yield v

    def __contains__(self, value: object) -> bool:
        return value in self._counts

    def count(self, value: int) -> int:
        return self._counts.get(value, 0)

    def __bool__(self) -> bool:
        return self._size > 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._counts == other._counts

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Multiset({list(self)!r})"

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in self) + "]"

    def max(self) -> int:
        if not self._counts:
            raise ValueError("max() of empty multiset")
        return max(self._counts)

    def total(self) -> int:
        """Sum of the values (with multiplicity)."""
        return sum(v * c for v, c in self._counts.items())

    def includes(self, other: "Multiset") -> bool:
        return all(self._counts.get(v, 0) >= c for v, c in other._counts.items())

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Multiset") -> "Multiset":
        return ms_sum(self, other)

    def __sub__(self, other: "Multiset") -> "Multiset":
        return ms_diff(self, other)

    def __mul__(self, other: "Multiset") -> "Multiset":
        return ms_product(self, other)


EMPTY = Multiset()


def ms_sum(a: Multiset, b: Multiset) -> Multiset:
    if not b._counts:
        return a
    if not a._counts:
        return b
    counts = dict(a._counts)
    for v, c in b._counts.items():
        counts[v] = counts.get(v, 0) + c
    return Multiset.from_counts(counts)


def ms_diff(a: Multiset, b: Multiset) -> Multiset:
    counts = dict(a._counts)
    for v, c in b._counts.items():
        have = counts.get(v, 0)
        if have < c:
            raise NotIncluded(f"{b} is not included in {a}")
        if have == c:
            del counts[v]
        else:
            counts[v] = have - c
    return Multiset.from_counts(counts)


def ms_product(a: Multiset, b: Multiset) -> Multiset:
    counts: dict[int, int] = {}
    for x, cx in a._counts.items():
        for y, cy in b._counts.items():
            counts[x * y] = counts.get(x * y, 0) + cx * cy
    return Multiset.from_counts(counts)


def ms_sum_all(parts: Iterable[Multiset]) -> Multiset:
    counts: Counter[int] = Counter()
    for p in parts:
        counts.update(p._counts)
    return Multiset.from_counts(counts)


def ms_division(m3: Multiset, m1: Multiset) -> Multiset:
    """Return ``q`` with ``q * m1 == m3``.

    While ``m3`` holds a positive value, the quotient gains ``max(m3) / max(m1)``
    and ``m3`` loses ``[that] * m1``; leftover zeros are shared out as
    ``|m3| / |m1|`` zero quotients.  Raises ``NotDivisible`` on any failure.
    """
    if not m1._counts or max(m1._counts) == 0:
        raise NotDivisible(f"divisor {m1} has no positive value")
    d = max(m1._counts)
    rest = dict(m3._counts)
    # lazy-deletion max-heap over the distinct values still present in rest
    heap = [-v for v in rest if v > 0]
    heapq.heapify(heap)
    quotient: dict[int, int] = {}
    divisor = list(m1._counts.items())
    while heap:
        top = -heap[0]
        if rest.get(top, 0) == 0:
            heapq.heappop(heap)
            continue
        y, r = divmod(top, d)
        if r:
            raise NotDivisible(f"{top} is not a multiple of {d}")
        # remove [y] * m1 from rest
        for x, c in divisor:
            v = x * y
            have = rest.get(v, 0)
            if have < c:
                raise NotDivisible(f"[{y}] * {m1} is not included in the remainder")
            if have == c:
                del rest[v]
            else:
                rest[v] = have - c
        quotient[y] = quotient.get(y, 0) + 1
    zeros = rest.get(0, 0)
    if zeros:
        k, r = divmod(zeros, len(m1))
        if r:
            raise NotDivisible(f"{zeros} leftover zeros not divisible by |m1|={len(m1)}")
        quotient[0] = quotient.get(0, 0) + k
    return Multiset.from_counts(quotient)


def parse_multiset(text: str) -> Multiset:
    """Parse the bracket rendering, e.g. ``[0,0,1]`` or ``[]``."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"not a bracketed multiset: {text!r}")
    body = text[1:-1].strip()
    if not body:
        return EMPTY
    return Multiset(int(tok) for tok in body.split(","))
