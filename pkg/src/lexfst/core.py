"""Core types for weighted, range-labelled string transducers.

A machine consumes one input symbol per transition.  Transitions are
labelled with inclusive code point ranges, carry an output string and a
weight, and there are no empty-label transitions anywhere.  Competing paths
of equal length are ranked by their weight sequences under ``lex_compare``,
where the weight added last dominates and ties recurse on the prefix.  The
partial state-output map ``tau`` appends one final effect when the input
ends on that state, which is also what lets a machine emit output for the
empty input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

MAX_SYMBOL = 0x10FFFF
INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1

LESS = -1
EQUAL = 0
GREATER = 1


def is_symbol(code: int) -> bool:
    """True for Unicode scalar values (surrogates excluded)."""
    return 0 <= code <= MAX_SYMBOL and not 0xD800 <= code <= 0xDFFF


def check_symbol(code: int) -> int:
    if not isinstance(code, int) or isinstance(code, bool) or not is_symbol(code):
        raise ValueError(f"not a Unicode scalar value: {code!r}")
    return code


def check_weight(w: int) -> int:
    if not isinstance(w, int) or isinstance(w, bool) or not INT64_MIN <= w <= INT64_MAX:
        raise ValueError(f"weight outside signed 64-bit range: {w!r}")
    return w


def check_text(text: str) -> str:
    """Reject strings containing surrogate code points."""
    try:
        # UTF-8 encoding fails on exactly the surrogate range
        text.encode("utf-8")
    except UnicodeEncodeError as e:
        raise ValueError(f"surrogate code point at index {e.start} in string") from None
    return text


@dataclass(frozen=True)
class RangeLabel:
    """Inclusive interval of input symbols; a single symbol is ``lo == hi``."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        check_symbol(self.lo)
        check_symbol(self.hi)
        if self.lo > self.hi:
            raise ValueError(f"empty range: lo U+{self.lo:04X} > hi U+{self.hi:04X}")

    def contains(self, code: int) -> bool:
        return self.lo <= code <= self.hi


def range_intersect(a: RangeLabel, b: RangeLabel) -> RangeLabel | None:
    """Intersection of two ranges, or None when they are disjoint."""
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        return None
    return RangeLabel(lo, hi)


@dataclass(frozen=True)
class Effect:
    """Output string plus weight: the annotation attached to a step.

    Effects form a monoid under ``effect_mul`` with ``IDENTITY`` as the
    neutral element.
    """

    out: str = ""
    w: int = 0


IDENTITY = Effect("", 0)


def effect_mul(a: Effect | None, b: Effect | None) -> Effect | None:
    """Monoid product: concatenate outputs, add weights.

    ``None`` stands for an absent effect and is absorbing, so
    ``effect_mul(None, x)`` is ``None``.  A weight sum leaving the signed
    64-bit range raises OverflowError rather than wrapping; a wrapped
    weight would silently reorder paths.
    """
    if a is None or b is None:
        return None
    w = a.w + b.w
    if not INT64_MIN <= w <= INT64_MAX:
        raise OverflowError(f"weight sum {w} outside signed 64-bit range")
    return Effect(a.out + b.out, w)


def lex_compare(a: Sequence[int], b: Sequence[int]) -> int:
    """Compare two equal-length weight sequences; the last element dominates.

    Returns LESS, EQUAL or GREATER.  Ties on the last element recurse on the
    prefix, so the sequences are scanned back to front.  Sequences of
    different lengths are not ordered and raise ValueError.
    """
    if len(a) != len(b):
        raise ValueError(f"cannot compare weight sequences of lengths {len(a)} and {len(b)}")
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return GREATER if x > y else LESS
    return EQUAL


class Policy(enum.Enum):
    """Which end of the weight order wins when paths compete."""

    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class Transition:
    src: int
    label: RangeLabel
    dst: int
    eff: Effect = IDENTITY


@dataclass(frozen=True)
class Transducer:
    """Immutable machine: states 0..state_count-1, one initial state.

    ``tau`` maps accepting states to their final effect; states absent from
    ``tau`` reject.  ``colors`` optionally names the sub-alphabet a state
    belongs to (used by the interleaving checks).  Structural invariants are
    validated on construction, so a held instance is always well formed, and
    instances are safe to share between threads.
    """

    state_count: int
    initial: int = 0
    transitions: tuple[Transition, ...] = ()
    tau: Mapping[int, Effect] = field(default_factory=dict)
    colors: Mapping[int, str] = field(default_factory=dict)
    policy: Policy = Policy.MAX

    def __post_init__(self) -> None:
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "tau", MappingProxyType(dict(self.tau)))
        object.__setattr__(self, "colors", MappingProxyType(dict(self.colors)))
        self.validate()

    def validate(self) -> "Transducer":
        if self.state_count < 1:
            raise ValueError("machine needs at least one state")
        if not 0 <= self.initial < self.state_count:
            raise ValueError(f"initial state {self.initial} out of range")
        if not isinstance(self.policy, Policy):
            raise ValueError(f"bad policy: {self.policy!r}")
        for i, t in enumerate(self.transitions):
            if not isinstance(t, Transition):
                raise ValueError(f"transition {i} is not a Transition: {t!r}")
            if not 0 <= t.src < self.state_count or not 0 <= t.dst < self.state_count:
                raise ValueError(f"transition {i} references a state out of range")
            check_weight(t.eff.w)
            check_text(t.eff.out)
        for state, eff in self.tau.items():
            if not 0 <= state < self.state_count:
                raise ValueError(f"tau references state {state} out of range")
            check_weight(eff.w)
            check_text(eff.out)
        for state, name in self.colors.items():
            if not 0 <= state < self.state_count:
                raise ValueError(f"color references state {state} out of range")
            if not isinstance(name, str) or not name:
                raise ValueError(f"bad color name for state {state}: {name!r}")
        return self

    def transitions_by_source(self) -> list[list[int]]:
        """Transition indices grouped by source state, in stored order."""
        grouped: list[list[int]] = [[] for _ in range(self.state_count)]
        for i, t in enumerate(self.transitions):
            grouped[t.src].append(i)
        return grouped


def codes_of(text: str) -> list[int]:
    """Code points of an input string, rejecting surrogates."""
    check_text(text)
    return list(map(ord, text))
