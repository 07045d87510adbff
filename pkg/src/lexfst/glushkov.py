"""Position-automaton construction for weighted patterns.

``localize`` numbers every input atom of a desugared tree left to right and
remembers each position's original range and annotation.  Four recursive
maps over the localized tree then drive assembly:

* ``empty_effect``: the effect produced for the empty input, if any;
* ``begins``: positions that can open a match, with the effect emitted
  before reaching them;
* ``ends``: positions that can close a match, with the effect emitted after
  leaving them;
* ``links``: ordered position pairs that can be adjacent, with the effect
  emitted between them.

The machine has one state per position plus a start state, one transition
per ``begins``/``links`` entry, and state outputs taken from ``ends`` (plus
the empty-input effect on the start state).  No empty-label transitions are
ever produced, and no transition enters the start state.
"""

from __future__ import annotations

from typing import NamedTuple

from .core import Effect, IDENTITY, Policy, RangeLabel, Transducer, Transition, effect_mul
from .parser import parse
from .syntax import (
    Atom,
    Concat,
    Epsilon,
    Node,
    OutputConcat,
    Span,
    Star,
    Union,
    WeightAfter,
    WeightBefore,
    desugar,
    with_position,
)


class AmbiguousPatternError(ValueError):
    """The pattern denotes several effects for one matched input."""

    def __init__(self, message: str, span: Span | None = None):
        if span is not None:
            message = f"{span[0]}:{span[1]}: {message}"
        super().__init__(message)
        self.span = span


class Localized(NamedTuple):
    root: Node
    alpha: dict[int, tuple[RangeLabel, str | None]]

    @property
    def positions(self) -> int:
        return len(self.alpha)


def localize(node: Node) -> Localized:
    """Number the atoms of a desugared tree in document order, from 1."""
    alpha: dict[int, tuple[RangeLabel, str | None]] = {}

    def walk(n: Node) -> Node:
        if isinstance(n, Epsilon):
            return n
        if isinstance(n, Atom):
            pos = len(alpha) + 1
            alpha[pos] = (RangeLabel(n.lo, n.hi), n.alphabet)
            return with_position(n, pos)
        if isinstance(n, Union):
            return Union(walk(n.left), walk(n.right), span=n.span)
        if isinstance(n, Concat):
            return Concat(walk(n.left), walk(n.right), span=n.span)
        if isinstance(n, Star):
            return Star(walk(n.inner), span=n.span)
        if isinstance(n, OutputConcat):
            return OutputConcat(walk(n.inner), n.out, span=n.span)
        if isinstance(n, WeightBefore):
            return WeightBefore(n.w, walk(n.inner), span=n.span)
        if isinstance(n, WeightAfter):
            return WeightAfter(walk(n.inner), n.w, span=n.span)
        raise TypeError(f"localize requires a desugared tree, found {type(n).__name__}")

    return Localized(walk(node), alpha)


class _Facts(NamedTuple):
    lam: Effect | None
    first: dict[int, Effect]
    last: dict[int, Effect]
    pairs: dict[tuple[int, int], Effect]


def _merge_disjoint(a: dict, b: dict) -> dict:
    # Positions are unique across the tree, so first/last maps from disjoint
    # subtrees can never collide.
    merged = {**a, **b}
    assert len(merged) == len(a) + len(b), "position maps collided"
    return merged


def _merge_links(a: dict, b: dict, span: Span | None) -> dict:
    merged = dict(a)
    for key, eff in b.items():
        cur = merged.get(key)
        if cur is None:
            merged[key] = eff
        elif cur != eff:
            raise AmbiguousPatternError(
                "loop produces two different effects for the same adjacency; "
                "add weight annotations to disambiguate",
                span,
            )
    return merged


def _scale_left(eff: Effect | None, pmap: dict) -> dict:
    if eff is None:
        return {}
    if eff == IDENTITY:
        return dict(pmap)
    return {k: effect_mul(eff, v) for k, v in pmap.items()}


def _scale_right(pmap: dict, eff: Effect | None) -> dict:
    if eff is None:
        return {}
    if eff == IDENTITY:
        return dict(pmap)
    return {k: effect_mul(v, eff) for k, v in pmap.items()}


def _cross(last: dict, first: dict) -> dict:
    return {
        (a, b): effect_mul(ea, eb)
        for a, ea in last.items()
        for b, eb in first.items()
    }


def _pass(node: Node) -> _Facts:
    if isinstance(node, Epsilon):
        return _Facts(IDENTITY, {}, {}, {})
    if isinstance(node, Atom):
        if node.pos is None:
            raise ValueError("construction requires a localized tree")
        one = {node.pos: IDENTITY}
        return _Facts(None, one, dict(one), {})
    if isinstance(node, Union):
        l, r = _pass(node.left), _pass(node.right)
        if l.lam is not None and r.lam is not None:
            raise AmbiguousPatternError(
                "both branches of a union match the empty input; "
                "add weight annotations or restructure the pattern",
                node.span,
            )
        lam = l.lam if l.lam is not None else r.lam
        return _Facts(
            lam,
            _merge_disjoint(l.first, r.first),
            _merge_disjoint(l.last, r.last),
            _merge_links(l.pairs, r.pairs, node.span),
        )
    if isinstance(node, Concat):
        l, r = _pass(node.left), _pass(node.right)
        first = _merge_disjoint(l.first, _scale_left(l.lam, r.first))
        last = _merge_disjoint(_scale_right(l.last, r.lam), r.last)
        pairs = _merge_links(l.pairs, r.pairs, node.span)
        pairs = _merge_links(pairs, _cross(l.last, r.first), node.span)
        return _Facts(effect_mul(l.lam, r.lam), first, last, pairs)
    if isinstance(node, Star):
        inner = _pass(node.inner)
        if inner.lam is not None and inner.lam.out != "":
            raise AmbiguousPatternError(
                "the body of '*' emits output for the empty input, so the "
                "empty input would have unboundedly many outputs",
                node.span,
            )
        pairs = _merge_links(inner.pairs, _cross(inner.last, inner.first), node.span)
        return _Facts(IDENTITY, dict(inner.first), dict(inner.last), pairs)
    if isinstance(node, OutputConcat):
        inner = _pass(node.inner)
        eff = Effect(node.out, 0)
        return _Facts(
            effect_mul(inner.lam, eff),
            dict(inner.first),
            _scale_right(inner.last, eff),
            dict(inner.pairs),
        )
    if isinstance(node, WeightAfter):
        inner = _pass(node.inner)
        eff = Effect("", node.w)
        return _Facts(
            effect_mul(inner.lam, eff),
            dict(inner.first),
            _scale_right(inner.last, eff),
            dict(inner.pairs),
        )
    if isinstance(node, WeightBefore):
        inner = _pass(node.inner)
        eff = Effect("", node.w)
        return _Facts(
            effect_mul(inner.lam, eff),
            _scale_left(eff, inner.first),
            dict(inner.last),
            dict(inner.pairs),
        )
    raise TypeError(f"construction requires a desugared tree, found {type(node).__name__}")


def empty_effect(root: Node) -> Effect | None:
    """Effect produced for the empty input, or None when it is rejected."""
    return _pass(root).lam


def begins(root: Node) -> dict[int, Effect]:
    """Positions that can open a match, with the effect emitted before them."""
    return _pass(root).first


def ends(root: Node) -> dict[int, Effect]:
    """Positions that can close a match, with the effect emitted after them."""
    return _pass(root).last


def links(root: Node) -> dict[tuple[int, int], Effect]:
    """Adjacent position pairs, with the effect emitted between them."""
    return _pass(root).pairs


def assemble(loc: Localized, policy: Policy = Policy.MAX) -> Transducer:
    """Build the machine for a localized tree.

    State 0 is the start state; position k becomes state k.  The result has
    exactly ``positions + 1`` states and ``len(begins) + len(links)``
    transitions.
    """
    facts = _pass(loc.root)
    transitions = []
    for pos, eff in facts.first.items():
        label, _ = loc.alpha[pos]
        transitions.append(Transition(0, label, pos, eff))
    for (a, b), eff in facts.pairs.items():
        label, _ = loc.alpha[b]
        transitions.append(Transition(a, label, b, eff))
    transitions.sort(key=lambda t: (t.src, t.dst))

    tau = dict(facts.last)
    if facts.lam is not None:
        tau[0] = facts.lam
    colors = {pos: name for pos, (_, name) in loc.alpha.items() if name}

    machine = Transducer(
        state_count=loc.positions + 1,
        initial=0,
        transitions=tuple(transitions),
        tau=tau,
        colors=colors,
        policy=policy,
    )
    assert len(machine.transitions) == len(facts.first) + len(facts.pairs)
    assert all(t.dst != 0 for t in machine.transitions), "transition enters the start state"
    assert all(
        t.label == loc.alpha[t.dst][0] for t in machine.transitions
    ), "incoming labels disagree with the position's range"
    return machine


def compile_ast(node: Node, policy: Policy = Policy.MAX) -> Transducer:
    """Desugar, localize and assemble in one step."""
    return assemble(localize(desugar(node)), policy)


def compile_source(text: str, policy: Policy = Policy.MAX) -> Transducer:
    """Compile concrete syntax to a machine."""
    return compile_ast(parse(text), policy)
