"""Intervals on a path graph and offline optimal interval scheduling.

An interval ``(a, b)`` occupies the edges ``a, a+1, ..., b-1`` of a path whose
vertices are numbered ``0..m``. Two intervals overlap iff they share an edge;
touching at a vertex is allowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from operator import itemgetter
from typing import Iterable, NamedTuple

__all__ = [
    "Interval",
    "IntervalSet",
    "Solution",
    "OracleCapacityError",
    "BRUTEFORCE_CAP",
    "overlaps",
    "canonical",
    "is_feasible",
    "opt_eft",
    "opt_bruteforce",
    "read_intervals",
    "write_intervals",
]

BRUTEFORCE_CAP = 24


class _Pair(NamedTuple):
    start: int
    end: int


class Interval(_Pair):
    """Half-open integral interval ``[start, end)`` measured in edges."""

    __slots__ = ()

    def __new__(cls, start: int, end: int) -> "Interval":
        if isinstance(start, bool) or isinstance(end, bool):
            raise TypeError("interval endpoints must be integers")
        start, end = int(start), int(end)
        if start < 0:
            raise ValueError(f"interval start must be non-negative, got {start}")
        if start >= end:
            raise ValueError(f"interval must span at least one edge, got ({start}, {end})")
        return super().__new__(cls, start, end)

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Interval") -> bool:
        return self.start < other.end and other.start < self.end

    def sort_key(self) -> tuple[int, int]:
        return (self.end, self.start)

    def __repr__(self) -> str:
        return f"({self.start}, {self.end})"


# Duplicate-free request sets are plain frozensets of Interval.
IntervalSet = frozenset


class OracleCapacityError(ValueError):
    """Raised when the exhaustive oracle is asked to solve a too-large instance."""


@dataclass(frozen=True)
class Solution:
    chosen: tuple
    """Chosen intervals in canonical ``(end, start)`` order."""

    @property
    def profit(self) -> int:
        return len(self.chosen)

    @property
    def chosen_set(self) -> frozenset:
        return frozenset(self.chosen)


# (end, start) as a C-level key; intervals are (start, end) tuples
_END_START = itemgetter(1, 0)


def overlaps(a: Interval, b: Interval) -> bool:
    return a.start < b.end and b.start < a.end


def canonical(intervals: Iterable[Interval]) -> list:
    """Deduplicate and sort by ``(end, start)``."""
    return sorted(set(intervals), key=_END_START)


def is_feasible(intervals: Iterable) -> bool:
    """True iff no two of the given requests overlap.

    Works for any request type with an ``overlaps`` method; intervals take a
    sort-and-sweep fast path.
    """
    items = list(intervals)
    if all(isinstance(x, Interval) for x in items):
        items.sort()
        return all(a.end <= b.start for a, b in zip(items, items[1:]))
    return not any(
        items[i].overlaps(items[j])
        for i in range(len(items))
        for j in range(i + 1, len(items))
    )


def opt_eft(requests: Iterable[Interval]) -> Solution:
    """Maximum set of pairwise non-overlapping intervals by earliest finish time.

    Ties on the end point go to the smaller start. The result is fully
    determined by the input set, which matters because plan-based online
    algorithms start from this particular optimum.
    """
    chosen = []
    frontier = -1
    for iv in canonical(requests):
        if iv.start >= frontier:
            chosen.append(iv)
            frontier = iv.end
    return Solution(tuple(chosen))


def opt_bruteforce(requests: Iterable[Interval]) -> Solution:
    """Exhaustive maximum independent set; an oracle for :func:`opt_eft`.

    Explores include/exclude branches over the intervals with a simple
    cardinality bound. Exponential, so the input size is capped.
    """
    items = sorted(set(requests))
    if len(items) > BRUTEFORCE_CAP:
        raise OracleCapacityError(
            f"brute-force oracle handles at most {BRUTEFORCE_CAP} intervals, got {len(items)}"
        )
    n = len(items)
    conflict = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and items[i].overlaps(items[j]):
                conflict[i] |= 1 << j

    best_mask = 0
    best_size = 0

    def search(i: int, mask: int, size: int, blocked: int) -> None:
        nonlocal best_mask, best_size
        if size + (n - i) <= best_size:
            return
        if i == n:
            best_mask, best_size = mask, size
            return
        if not blocked >> i & 1:
            search(i + 1, mask | 1 << i, size + 1, blocked | conflict[i])
        search(i + 1, mask, size, blocked)

    search(0, 0, 0, 0)
    chosen = [items[i] for i in range(n) if best_mask >> i & 1]
    return Solution(tuple(sorted(chosen, key=_END_START)))


def read_intervals(stream) -> list:
    """Parse ``start end`` lines. Blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, line in enumerate(stream, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        fields = text.split()
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected 'start end', got {line.strip()!r}")
        try:
            out.append(Interval(int(fields[0]), int(fields[1])))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def write_intervals(intervals: Iterable[Interval], stream) -> None:
    for iv in intervals:
        stream.write(f"{iv.start} {iv.end}\n")
