"""Static machine checks: weight-conflict search and alphabet coloring.

A machine is certainly functional when no two simultaneously reachable
states can step into a common target over overlapping labels with equal
weights (and no such pair is jointly accepting with equal final weights).
``find_weight_conflicts`` searches for violations with a product-state
sweep; an empty result certifies functionality, a non-empty one only means
"unknown", since a conflict does not by itself make the machine ambiguous.

``check_coloring`` validates a machine against a named-alphabet discipline:
which alphabets may open a word, which ordered alphabet pairs may be
adjacent, and which may close a word.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .core import RangeLabel, Transducer, range_intersect
from .syntax import scan_quoted


@dataclass(frozen=True)
class ConflictWitness:
    """Two reachable states stepping together with equal weights.

    ``target`` is the shared destination state, or None when the conflict
    is between the two states' final outputs.
    """

    states: tuple[int, int]
    target: int | None
    label: RangeLabel | None
    weight: int

    def describe(self) -> str:
        p, q = self.states
        if self.target is None:
            return f"states ({p}, {q}) are both accepting with final weight {self.weight}"
        lab = f"[U+{self.label.lo:04X}-U+{self.label.hi:04X}]" if self.label else "?"
        return (
            f"states ({p}, {q}) both reach state {self.target} over {lab} "
            f"with weight {self.weight}"
        )


@dataclass(frozen=True)
class FunctionalityReport:
    certified: bool
    witnesses: tuple[ConflictWitness, ...]


def reachable_pairs(machine: Transducer) -> set[tuple[int, int]]:
    """State pairs simultaneously reachable with stepwise equal weights.

    Ordered pairs; the relation is symmetric and includes the diagonal.
    """
    by_src = machine.transitions_by_source()
    ts = machine.transitions
    start = (machine.initial, machine.initial)
    pairs = {start}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for i in by_src[p]:
            a = ts[i]
            for k in by_src[q]:
                b = ts[k]
                if a.eff.w != b.eff.w:
                    continue
                if range_intersect(a.label, b.label) is None:
                    continue
                nxt = (a.dst, b.dst)
                if nxt not in pairs:
                    pairs.add(nxt)
                    queue.append(nxt)
    return pairs


def find_weight_conflicts(machine: Transducer) -> tuple[ConflictWitness, ...]:
    """All weight conflicts between simultaneously reachable states.

    Distinct pairs are checked for a common step target and for joint
    acceptance; an occupied state with two distinct equal-weight transitions
    into one target over overlapping labels conflicts with itself.
    """
    by_src = machine.transitions_by_source()
    ts = machine.transitions
    witnesses: list[ConflictWitness] = []
    emitted = set()
    for p, q in sorted(reachable_pairs(machine)):
        if p > q:
            continue  # the mirror pair witnesses the same conflict
        if p == q:
            ids = by_src[p]
            for ai in range(len(ids)):
                a = ts[ids[ai]]
                for bi in range(ai + 1, len(ids)):
                    b = ts[ids[bi]]
                    if a.eff.w != b.eff.w or a.dst != b.dst:
                        continue
                    overlap = range_intersect(a.label, b.label)
                    if overlap is None:
                        continue
                    key = (p, q, a.dst, overlap, a.eff.w)
                    if key not in emitted:
                        emitted.add(key)
                        witnesses.append(ConflictWitness((p, q), a.dst, overlap, a.eff.w))
            continue
        for i in by_src[p]:
            a = ts[i]
            for k in by_src[q]:
                b = ts[k]
                if a.eff.w != b.eff.w or a.dst != b.dst:
                    continue
                overlap = range_intersect(a.label, b.label)
                if overlap is None:
                    continue
                key = (p, q, a.dst, overlap, a.eff.w)
                if key not in emitted:
                    emitted.add(key)
                    witnesses.append(ConflictWitness((p, q), a.dst, overlap, a.eff.w))
        ep = machine.tau.get(p)
        eq = machine.tau.get(q)
        if ep is not None and eq is not None and ep.w == eq.w:
            witnesses.append(ConflictWitness((p, q), None, None, ep.w))
    return tuple(witnesses)


def is_functional(machine: Transducer) -> FunctionalityReport:
    """CERTIFIED (no witnesses) or UNKNOWN with the witnesses found."""
    witnesses = find_weight_conflicts(machine)
    return FunctionalityReport(not witnesses, witnesses)


# ---------------------------------------------------------------------------
# interleaved alphabets


class InterleaveSpecError(ValueError):
    pass


@dataclass(frozen=True)
class InterleaveSpec:
    """Named alphabets plus the local-language discipline over them.

    ``initial`` names the alphabets allowed to open a word, ``pairs`` the
    ordered alphabet adjacencies, ``final`` the alphabets allowed to close
    one.  ``epsilon_allowed`` says whether accepting the empty input is
    tolerated.
    """

    alphabets: Mapping[str, tuple[RangeLabel, ...]]
    initial: frozenset[str]
    pairs: frozenset[tuple[str, str]]
    final: frozenset[str]
    epsilon_allowed: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "alphabets", MappingProxyType({k: tuple(v) for k, v in self.alphabets.items()})
        )
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        object.__setattr__(self, "final", frozenset(self.final))
        self.validate()

    def validate(self) -> "InterleaveSpec":
        for name in self.initial | self.final:
            if name not in self.alphabets:
                raise InterleaveSpecError(f"unknown alphabet: {name}")
        for a, b in self.pairs:
            if a not in self.alphabets or b not in self.alphabets:
                raise InterleaveSpecError(f"unknown alphabet in pair {a}->{b}")
        names = sorted(self.initial)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                if not self._disjoint(a, b):
                    raise InterleaveSpecError(
                        f"initial alphabets {a} and {b} overlap"
                    )
        by_source: dict[str, list[str]] = {}
        for a, b in sorted(self.pairs):
            by_source.setdefault(a, []).append(b)
        for a, succs in by_source.items():
            for i in range(len(succs)):
                for k in range(i + 1, len(succs)):
                    if not self._disjoint(succs[i], succs[k]):
                        raise InterleaveSpecError(
                            f"successors {succs[i]} and {succs[k]} of {a} overlap"
                        )
        return self

    def _disjoint(self, a: str, b: str) -> bool:
        if a == b:
            return False
        for ra in self.alphabets[a]:
            for rb in self.alphabets[b]:
                if range_intersect(ra, rb) is not None:
                    return False
        return True

    def covers(self, name: str, label: RangeLabel) -> bool:
        """True when every symbol of ``label`` lies in alphabet ``name``."""
        pieces = sorted(self.alphabets[name], key=lambda r: r.lo)
        need = label.lo
        for r in pieces:
            if r.lo > need:
                return False
            if r.hi >= need:
                need = r.hi + 1
                if need > label.hi:
                    return True
        return False


@dataclass(frozen=True)
class ColorViolation:
    rule: str  # annotation | label | initial | pair | final | epsilon | structure
    message: str


def check_coloring(machine: Transducer, spec: InterleaveSpec) -> tuple[ColorViolation, ...]:
    """Validate a machine's state colors against the discipline.

    States without an explicit color are auto-colored when exactly one
    alphabet covers all their incoming labels; otherwise the machine needs
    an annotation.  The start state is exempt from colors; accepting at the
    start state is governed by ``spec.epsilon_allowed``.
    """
    spec.validate()
    violations: list[ColorViolation] = []
    incoming: dict[int, set[RangeLabel]] = {}
    involved: set[int] = set(machine.tau)
    for t in machine.transitions:
        incoming.setdefault(t.dst, set()).add(t.label)
        involved.add(t.src)
        involved.add(t.dst)
    involved.discard(machine.initial)

    colors: dict[int, str] = {}
    for state in sorted(involved):
        labels = sorted(incoming.get(state, ()), key=lambda r: (r.lo, r.hi))
        explicit = machine.colors.get(state)
        if explicit is not None:
            if explicit not in spec.alphabets:
                violations.append(
                    ColorViolation("annotation", f"state {state}: unknown alphabet {explicit!r}")
                )
                continue
            colors[state] = explicit
            for lab in labels:
                if not spec.covers(explicit, lab):
                    violations.append(
                        ColorViolation(
                            "label",
                            f"state {state}: incoming label [U+{lab.lo:04X}-U+{lab.hi:04X}] "
                            f"is not covered by alphabet {explicit}",
                        )
                    )
            continue
        candidates = [
            name
            for name in sorted(spec.alphabets)
            if labels and all(spec.covers(name, lab) for lab in labels)
        ]
        if len(candidates) == 1:
            colors[state] = candidates[0]
        else:
            reason = "no alphabet covers" if len(candidates) == 0 else "several alphabets cover"
            violations.append(
                ColorViolation(
                    "annotation",
                    f"state {state}: {reason} its incoming labels; annotate the pattern",
                )
            )

    for t in machine.transitions:
        if t.dst == machine.initial:
            violations.append(
                ColorViolation(
                    "structure",
                    f"transition {t.src}->{t.dst} re-enters the start state, "
                    "which carries no color",
                )
            )
            continue
        dst_color = colors.get(t.dst)
        if dst_color is None:
            continue  # already reported above
        if t.src == machine.initial:
            if dst_color not in spec.initial:
                violations.append(
                    ColorViolation(
                        "initial",
                        f"state {t.dst} ({dst_color}) can open a word but {dst_color} "
                        "is not an initial alphabet",
                    )
                )
        else:
            src_color = colors.get(t.src)
            if src_color is not None and (src_color, dst_color) not in spec.pairs:
                violations.append(
                    ColorViolation(
                        "pair",
                        f"transition {t.src}->{t.dst} puts {dst_color} after {src_color}, "
                        "which the alphabet pairs do not allow",
                    )
                )

    for state in sorted(machine.tau):
        if state == machine.initial:
            if not spec.epsilon_allowed:
                violations.append(
                    ColorViolation("epsilon", "the machine accepts the empty input")
                )
            continue
        color = colors.get(state)
        if color is not None and color not in spec.final:
            violations.append(
                ColorViolation(
                    "final",
                    f"state {state} ({color}) is accepting but {color} "
                    "is not a final alphabet",
                )
            )

    return tuple(violations)


# ---------------------------------------------------------------------------
# spec file format


def parse_interleave_spec(text: str) -> InterleaveSpec:
    """Parse the line-based alphabet discipline format.

    Lines: ``alphabet <Name> = [lo-hi](,[lo-hi])*``, ``initial: A,B``,
    ``pairs: A->B,B->A``, ``final: A``, ``epsilon: allowed|forbidden``.
    '#' starts a comment.
    """
    alphabets: dict[str, tuple[RangeLabel, ...]] = {}
    initial: frozenset[str] | None = None
    pairs: frozenset[tuple[str, str]] | None = None
    final: frozenset[str] | None = None
    epsilon: bool | None = None

    def err(lineno: int, message: str) -> InterleaveSpecError:
        return InterleaveSpecError(f"line {lineno}: {message}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet"):
            rest = line[len("alphabet") :].strip()
            if "=" not in rest:
                raise err(lineno, "expected 'alphabet <Name> = [lo-hi],...'")
            name, _, body = rest.partition("=")
            name = name.strip()
            if not name.isidentifier():
                raise err(lineno, f"bad alphabet name {name!r}")
            if name in alphabets:
                raise err(lineno, f"alphabet {name} defined twice")
            ranges = []
            for piece in body.split(","):
                piece = piece.strip()
                try:
                    ranges.append(_parse_range(piece))
                except ValueError as e:
                    raise err(lineno, str(e)) from None
            if not ranges:
                raise err(lineno, "alphabet needs at least one range")
            alphabets[name] = tuple(ranges)
        elif line.startswith("initial:"):
            if initial is not None:
                raise err(lineno, "duplicate 'initial:' line")
            initial = frozenset(_parse_names(line[len("initial:") :]))
        elif line.startswith("pairs:"):
            if pairs is not None:
                raise err(lineno, "duplicate 'pairs:' line")
            parsed = set()
            for piece in line[len("pairs:") :].split(","):
                piece = piece.strip()
                if not piece:
                    continue
                if "->" not in piece:
                    raise err(lineno, f"bad pair {piece!r}, expected 'A->B'")
                a, _, b = piece.partition("->")
                parsed.add((a.strip(), b.strip()))
            pairs = frozenset(parsed)
        elif line.startswith("final:"):
            if final is not None:
                raise err(lineno, "duplicate 'final:' line")
            final = frozenset(_parse_names(line[len("final:") :]))
        elif line.startswith("epsilon:"):
            if epsilon is not None:
                raise err(lineno, "duplicate 'epsilon:' line")
            value = line[len("epsilon:") :].strip()
            if value == "allowed":
                epsilon = True
            elif value == "forbidden":
                epsilon = False
            else:
                raise err(lineno, "epsilon must be 'allowed' or 'forbidden'")
        else:
            raise err(lineno, f"unrecognized line: {line!r}")

    try:
        return InterleaveSpec(
            alphabets=alphabets,
            initial=initial or frozenset(),
            pairs=pairs or frozenset(),
            final=final or frozenset(),
            epsilon_allowed=True if epsilon is None else epsilon,
        )
    except InterleaveSpecError:
        raise
    except ValueError as e:
        raise InterleaveSpecError(str(e)) from None


def load_interleave_spec(path) -> InterleaveSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_interleave_spec(fh.read())


def _parse_names(body: str) -> list[str]:
    names = [piece.strip() for piece in body.split(",")]
    return [name for name in names if name]


def _parse_range(piece: str) -> RangeLabel:
    if len(piece) < 2 or piece[0] != "[" or piece[-1] != "]":
        raise ValueError(f"bad range {piece!r}, expected [lo-hi]")
    body = piece[1:-1]
    lo, i = _parse_range_char(body, 0)
    if i >= len(body) or body[i] != "-":
        raise ValueError(f"bad range {piece!r}, expected [lo-hi]")
    hi, i = _parse_range_char(body, i + 1)
    if i != len(body):
        raise ValueError(f"bad range {piece!r}, trailing characters")
    if lo > hi:
        raise ValueError(f"range {piece!r} is reversed")
    return RangeLabel(lo, hi)


def _parse_range_char(body: str, i: int) -> tuple[int, int]:
    if i >= len(body):
        raise ValueError("truncated range")
    if body[i] == "\\":
        length = 6 if i + 1 < len(body) and body[i + 1] == "u" else 2
        decoded, _ = scan_quoted("'" + body[i : i + length] + "'", 0)
        if len(decoded) != 1:
            raise ValueError("bad escape in range")
        return ord(decoded), i + length
    return ord(body[i]), i + 1
