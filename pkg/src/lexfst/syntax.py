"""Expression trees for the pattern language, plus desugaring and printing.

Core node kinds are Epsilon, Atom, Union, Concat, Star, OutputConcat,
WeightBefore and WeightAfter.  The parser additionally produces the sugar
kinds Plus, Question and Dot; ``desugar`` rewrites those away so the
construction and the oracle only ever see the eight core kinds.

``to_source`` renders a tree back to concrete syntax with just enough
parentheses that reparsing yields a structurally identical tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

from .core import MAX_SYMBOL, check_symbol, check_weight

# (line, column), 1-based; excluded from equality so trees built in tests
# compare structurally.
Span = tuple[int, int]


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Epsilon(Node):
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Atom(Node):
    """One input symbol out of an inclusive range; ``pos`` is set once the
    tree has been localized (every atom numbered left to right)."""

    lo: int
    hi: int
    alphabet: str | None = None
    pos: int | None = None
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        check_symbol(self.lo)
        check_symbol(self.hi)
        if self.lo > self.hi:
            raise ValueError("atom range is reversed")


@dataclass(frozen=True)
class Union(Node):
    left: Node
    right: Node
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Concat(Node):
    left: Node
    right: Node
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Star(Node):
    inner: Node
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class OutputConcat(Node):
    """Append a fixed output string after whatever ``inner`` produces.

    The output operand is always a plain string, never a sub-expression.
    """

    inner: Node
    out: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class WeightBefore(Node):
    w: int
    inner: Node
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        check_weight(self.w)


@dataclass(frozen=True)
class WeightAfter(Node):
    inner: Node
    w: int
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        check_weight(self.w)


@dataclass(frozen=True)
class Plus(Node):
    inner: Node
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Question(Node):
    inner: Node
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Dot(Node):
    span: Span | None = field(default=None, compare=False, repr=False)


_CORE = (Epsilon, Atom, Union, Concat, Star, OutputConcat, WeightBefore, WeightAfter)

# The wildcard splits around the surrogate gap so both endpoints stay valid
# scalar values.
_DOT_LOW = (0x0, 0xD7FF)
_DOT_HIGH = (0xE000, MAX_SYMBOL)


def is_core(node: Node) -> bool:
    """True when the tree contains only the eight core node kinds."""
    return all(isinstance(n, _CORE) for n in walk(node))


def walk(node: Node) -> Iterator[Node]:
    yield node
    if isinstance(node, (Union, Concat)):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, (Star, OutputConcat, Plus, Question)):
        yield from walk(node.inner)
    elif isinstance(node, (WeightBefore, WeightAfter)):
        yield from walk(node.inner)


def desugar(node: Node) -> Node:
    """Rewrite sugar forms into core nodes.

    ``x+`` becomes ``x x*``, ``x?`` becomes ``'' | x`` and ``.`` becomes the
    union of the two ranges flanking the surrogate gap.
    """
    if isinstance(node, (Epsilon, Atom)):
        return node
    if isinstance(node, Union):
        return Union(desugar(node.left), desugar(node.right), span=node.span)
    if isinstance(node, Concat):
        return Concat(desugar(node.left), desugar(node.right), span=node.span)
    if isinstance(node, Star):
        return Star(desugar(node.inner), span=node.span)
    if isinstance(node, OutputConcat):
        return OutputConcat(desugar(node.inner), node.out, span=node.span)
    if isinstance(node, WeightBefore):
        return WeightBefore(node.w, desugar(node.inner), span=node.span)
    if isinstance(node, WeightAfter):
        return WeightAfter(desugar(node.inner), node.w, span=node.span)
    if isinstance(node, Plus):
        inner = desugar(node.inner)
        return Concat(inner, Star(inner, span=node.span), span=node.span)
    if isinstance(node, Question):
        return Union(Epsilon(span=node.span), desugar(node.inner), span=node.span)
    if isinstance(node, Dot):
        return Union(
            Atom(*_DOT_LOW, span=node.span),
            Atom(*_DOT_HIGH, span=node.span),
            span=node.span,
        )
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# string literal escaping, shared with the artifact format

_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", "'": "'", "n": "\n", "t": "\t"}


def escape_text(s: str) -> str:
    parts = []
    for ch in s:
        if ch in _ESCAPES:
            parts.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            parts.append(f"\\u{ord(ch):04X}")
        else:
            parts.append(ch)
    return "".join(parts)


def quote(s: str) -> str:
    """Render a string as a single-quoted literal."""
    return "'" + escape_text(s) + "'"


def scan_quoted(text: str, i: int) -> tuple[str, int]:
    """Decode the quoted literal starting at ``text[i]``.

    Returns the decoded string and the index just past the closing quote.
    Raises ValueError on malformed input; the caller supplies location info.
    """
    if i >= len(text) or text[i] != "'":
        raise ValueError("expected a string literal")
    i += 1
    parts = []
    while True:
        if i >= len(text):
            raise ValueError("unterminated string literal")
        ch = text[i]
        if ch == "'":
            return "".join(parts), i + 1
        if ch == "\\":
            if i + 1 >= len(text):
                raise ValueError("unterminated escape sequence")
            esc = text[i + 1]
            if esc in _UNESCAPES:
                parts.append(_UNESCAPES[esc])
                i += 2
                continue
            if esc == "u":
                hexpart = text[i + 2 : i + 6]
                if len(hexpart) != 4:
                    raise ValueError("\\u escape needs four hex digits")
                try:
                    code = int(hexpart, 16)
                except ValueError:
                    raise ValueError(f"bad \\u escape: \\u{hexpart}") from None
                if 0xD800 <= code <= 0xDFFF:
                    raise ValueError(f"surrogate code point U+{code:04X} not allowed")
                parts.append(chr(code))
                i += 6
                continue
            raise ValueError(f"unknown escape sequence: \\{esc}")
        if 0xD800 <= ord(ch) <= 0xDFFF:
            raise ValueError("surrogate code point in string literal")
        parts.append(ch)
        i += 1


def class_char(code: int) -> str:
    """Render a character class endpoint."""
    ch = chr(code)
    if ch.isascii() and ch.isalnum():
        return ch
    if code <= 0xFFFF:
        return f"\\u{code:04X}"
    return ch


# ---------------------------------------------------------------------------
# printing

# Binding strength, loosest to tightest: union, concatenation, prefix
# weight, postfix operators, atoms.
_UNION, _CONCAT, _PREFIX, _POSTFIX, _ATOMIC = range(5)


def _level(node: Node) -> int:
    if isinstance(node, Union):
        return _UNION
    if isinstance(node, Concat):
        return _CONCAT
    if isinstance(node, WeightBefore):
        return _PREFIX
    if isinstance(node, (Star, Plus, Question, OutputConcat, WeightAfter)):
        return _POSTFIX
    return _ATOMIC


def to_source(node: Node) -> str:
    """Concrete syntax for a tree; reparsing gives back the same structure."""
    return _render(node, _UNION)


def _render(node: Node, need: int) -> str:
    text = _render_bare(node)
    if _level(node) < need:
        return "(" + text + ")"
    return text


def _render_bare(node: Node) -> str:
    if isinstance(node, Epsilon):
        return "''"
    if isinstance(node, Atom):
        suffix = f"@{node.alphabet}" if node.alphabet else ""
        if node.lo == node.hi:
            return quote(chr(node.lo)) + suffix
        return f"[{class_char(node.lo)}-{class_char(node.hi)}]" + suffix
    if isinstance(node, Dot):
        return "."
    if isinstance(node, Union):
        return _render(node.left, _UNION) + "|" + _render(node.right, _CONCAT)
    if isinstance(node, Concat):
        return _render(node.left, _CONCAT) + " " + _render(node.right, _POSTFIX)
    if isinstance(node, Star):
        return _render(node.inner, _POSTFIX) + "*"
    if isinstance(node, Plus):
        return _render(node.inner, _POSTFIX) + "+"
    if isinstance(node, Question):
        return _render(node.inner, _POSTFIX) + "?"
    if isinstance(node, OutputConcat):
        return _render(node.inner, _POSTFIX) + ":" + quote(node.out)
    if isinstance(node, WeightAfter):
        return _render(node.inner, _POSTFIX) + " " + str(node.w)
    if isinstance(node, WeightBefore):
        return str(node.w) + " " + _render(node.inner, _POSTFIX)
    raise TypeError(f"not an expression node: {node!r}")


def with_position(atom: Atom, pos: int) -> Atom:
    return replace(atom, pos=pos)
