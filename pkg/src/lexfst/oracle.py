"""Brute-force reference semantics for small patterns.

``valuate`` enumerates the relation a tree denotes, truncated to inputs of a
given maximum length, and ``best`` picks the winning output for one input.
Both are exponential and exist as an independent cross-check for the
compiled machines; they are deliberately kept too simple to be wrong in the
same way twice.

Weights are collapsed here to a single integer per pair (the sum of all
weight annotations met along a derivation).  The compiled machines rank
paths by their full weight sequences instead, so the two agree only on
machines free of weight conflicts; that is exactly the setting the oracle
is used in.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Effect, IDENTITY, Policy, effect_mul, is_symbol
from .syntax import (
    Atom,
    Concat,
    Epsilon,
    Node,
    OutputConcat,
    Star,
    Union,
    WeightAfter,
    WeightBefore,
)

MAX_ORACLE_LEN = 8
MAX_ATOM_WIDTH = 64


class _Ambiguous:
    def __repr__(self) -> str:  # pragma: no cover
        return "AMBIGUOUS"


AMBIGUOUS = _Ambiguous()


@dataclass(frozen=True)
class Relation:
    """Finite set of (input, effect) pairs, all inputs of length <= max_len.

    One input may appear with several effects; ambiguity is data here.
    """

    pairs: frozenset[tuple[str, Effect]]
    max_len: int

    def outputs_for(self, text: str) -> set[Effect]:
        return {eff for s, eff in self.pairs if s == text}

    def inputs(self) -> set[str]:
        return {s for s, _ in self.pairs}


def valuate(node: Node, max_len: int) -> Relation:
    """Enumerate the denoted relation, truncated to inputs of length <= max_len.

    Only desugared trees are accepted.  Atom ranges wider than
    MAX_ATOM_WIDTH symbols and bounds above MAX_ORACLE_LEN are rejected:
    this is a test oracle, not an engine.
    """
    if not 0 <= max_len <= MAX_ORACLE_LEN:
        raise ValueError(f"oracle bound must be in 0..{MAX_ORACLE_LEN}")
    pairs = _value(node, max_len)
    return Relation(frozenset(pairs), max_len)


def best(rel: Relation, text: str, policy: Policy):
    """The winning output for ``text``: a string, None, or AMBIGUOUS.

    Picks the effect with the best weight under ``policy``; AMBIGUOUS means
    two distinct outputs tie for the best weight.
    """
    if len(text) > rel.max_len:
        raise ValueError("relation was built with a smaller length bound")
    effects = rel.outputs_for(text)
    if not effects:
        return None
    if policy is Policy.MAX:
        target = max(eff.w for eff in effects)
    else:
        target = min(eff.w for eff in effects)
    outputs = {eff.out for eff in effects if eff.w == target}
    if len(outputs) > 1:
        return AMBIGUOUS
    return outputs.pop()


def _value(node: Node, bound: int) -> set[tuple[str, Effect]]:
    if isinstance(node, Epsilon):
        return {("", IDENTITY)}
    if isinstance(node, Atom):
        symbols = [c for c in range(node.lo, node.hi + 1) if is_symbol(c)]
        if len(symbols) > MAX_ATOM_WIDTH:
            raise ValueError(f"atom range too wide for the oracle ({len(symbols)} symbols)")
        if bound < 1:
            return set()
        return {(chr(c), IDENTITY) for c in symbols}
    if isinstance(node, Union):
        return _value(node.left, bound) | _value(node.right, bound)
    if isinstance(node, Concat):
        return _join(_value(node.left, bound), _value(node.right, bound), bound)
    if isinstance(node, Star):
        return _star(_value(node.inner, bound), bound)
    if isinstance(node, OutputConcat):
        return _scale(_value(node.inner, bound), Effect(node.out, 0))
    if isinstance(node, WeightAfter):
        return _scale(_value(node.inner, bound), Effect("", node.w))
    if isinstance(node, WeightBefore):
        # weight sums commute, so one-sided scaling is enough
        return _scale(_value(node.inner, bound), Effect("", node.w))
    raise TypeError(f"oracle needs a desugared tree, found {type(node).__name__}")


def _join(a, b, bound):
    out = set()
    for s1, e1 in a:
        for s2, e2 in b:
            if len(s1) + len(s2) <= bound:
                out.add((s1 + s2, effect_mul(e1, e2)))
    return out


def _scale(pairs, eff: Effect):
    return {(s, effect_mul(e, eff)) for s, e in pairs}


def _star(step, bound):
    # Fixpoint of prefix-closing under one more factor.  A body that matches
    # the empty input with a non-identity effect would grow effects forever
    # (such patterns do not compile); the round cap cuts those off while
    # leaving every terminating case untouched.
    result = {("", IDENTITY)}
    frontier = result
    for _ in range(bound + 2):
        frontier = _join(frontier, step, bound)
        new = frontier - result
        if not new:
            break
        result |= new
    return result
