"""Breakpoint index answering "which ranges contain x" in O(log n).

The breakpoint array holds every range's upper endpoint plus the
predecessor of every lower endpoint (a lower endpoint of 0 contributes
nothing).  Between consecutive breakpoints the set of covering ranges is
constant, so the row attached to the smallest breakpoint >= x is exactly
the answer for x; above the last breakpoint nothing is covered.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

from .core import RangeLabel


@dataclass(frozen=True)
class RangeIndex:
    breakpoints: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    ranges: tuple[RangeLabel, ...]

    @classmethod
    def build(cls, ranges: Sequence[RangeLabel]) -> "RangeIndex":
        if not ranges:
            raise ValueError("cannot index an empty range list")
        points = set()
        for r in ranges:
            points.add(r.hi)
            if r.lo > 0:
                points.add(r.lo - 1)
        breakpoints = tuple(sorted(points))
        rows = tuple(
            tuple(j for j, r in enumerate(ranges) if r.lo <= p <= r.hi)
            for p in breakpoints
        )
        return cls(breakpoints, rows, tuple(ranges))

    def lookup(self, x: int) -> tuple[int, ...]:
        """Ids of all ranges containing ``x`` (empty above the last breakpoint)."""
        i = bisect_left(self.breakpoints, x)
        if i == len(self.breakpoints):
            return ()
        return self.rows[i]

    def lookup_counted(self, x: int) -> tuple[tuple[int, ...], int]:
        """Like ``lookup`` but also reports the number of comparisons made."""
        lo, hi = 0, len(self.breakpoints)
        comparisons = 0
        while lo < hi:
            mid = (lo + hi) // 2
            comparisons += 1
            if self.breakpoints[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(self.breakpoints):
            return (), comparisons
        return self.rows[lo], comparisons
