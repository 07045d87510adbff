"""Parser for the concrete pattern syntax.

Grammar sketch (full version in the README):

    expr   := union
    union  := concat ('|' concat)*
    concat := term+
    term   := INT? factor (INT | ':' STRING | '*' | '+' | '?')*
    factor := STRING | CLASS | '.' | '(' expr ')'
    CLASS  := '[' CHAR '-' CHAR ']' ('@' IDENT)?
    STRING := "'" (chars with \\n \\t \\\\ \\' \\uXXXX escapes)* "'" ('@' IDENT)?
    INT    := '-'? [0-9]+

'|' binds loosest, juxtaposition next, postfix operators and weight literals
tightest.  Multi-character string literals denote concatenations of their
characters.  A term may also start with ':' STRING, shorthand for attaching
the output to the empty word.  '#' starts a line comment; whitespace is
insignificant outside literals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .core import INT64_MAX, INT64_MIN
from .syntax import (
    Atom,
    Concat,
    Dot,
    Epsilon,
    Node,
    OutputConcat,
    Plus,
    Question,
    Star,
    Union,
    WeightAfter,
    WeightBefore,
    scan_quoted,
)


class PatternSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "str" | "class" | "int" | "op" | "eof"
    value: Any
    line: int
    col: int


_DIGITS = frozenset("0123456789")


def _location(text: str, i: int) -> tuple[int, int]:
    line = text.count("\n", 0, i) + 1
    last = text.rfind("\n", 0, i)
    return line, i - last


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)

    def err(message: str, at: int) -> PatternSyntaxError:
        line, col = _location(text, at)
        return PatternSyntaxError(message, line, col)

    def scan_annotation(i: int) -> tuple[str | None, int]:
        if i < n and text[i] == "@":
            j = i + 1
            if j >= n or not (text[j].isascii() and (text[j].isalpha() or text[j] == "_")):
                raise err("expected an alphabet name after '@'", i)
            k = j + 1
            while k < n and text[k].isascii() and (text[k].isalnum() or text[k] == "_"):
                k += 1
            return text[j:k], k
        return None, i

    def scan_class_char(i: int) -> tuple[int, int]:
        if i >= n:
            raise err("unterminated character class", i)
        ch = text[i]
        if ch == "\\":
            if i + 1 >= n:
                raise err("unterminated escape sequence", i)
            # same escape repertoire as string literals
            esc_len = 6 if text[i + 1] == "u" else 2
            try:
                decoded, _ = scan_quoted("'" + text[i : i + esc_len] + "'", 0)
            except ValueError as e:
                raise err(str(e), i) from None
            if len(decoded) != 1:
                raise err("bad escape in character class", i)
            return ord(decoded), i + esc_len
        if ch in "]-":
            raise err(f"unexpected {ch!r} in character class (escape it with \\uXXXX)", i)
        if 0xD800 <= ord(ch) <= 0xDFFF:
            raise err("surrogate code point in character class", i)
        return ord(ch), i + 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "#":
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        line, col = _location(text, i)
        if ch == "'":
            try:
                value, j = scan_quoted(text, i)
            except ValueError as e:
                raise err(str(e), i) from None
            annot, j = scan_annotation(j)
            tokens.append(Token("str", (value, annot), line, col))
            i = j
            continue
        if ch == "[":
            if i + 1 < n and text[i + 1] == "]":
                raise err("empty character class", i)
            lo, j = scan_class_char(i + 1)
            if j >= n or text[j] != "-":
                raise err("expected '-' in character class", j)
            hi, j = scan_class_char(j + 1)
            if j >= n or text[j] != "]":
                raise err("expected ']' to close character class", j)
            if lo > hi:
                raise err("character class range is reversed (lo > hi)", i)
            annot, j = scan_annotation(j + 1)
            tokens.append(Token("class", (lo, hi, annot), line, col))
            i = j
            continue
        if ch in _DIGITS or (ch == "-" and i + 1 < n and text[i + 1] in _DIGITS):
            j = i + 1
            while j < n and text[j] in _DIGITS:
                j += 1
            value = int(text[i:j])
            if not INT64_MIN <= value <= INT64_MAX:
                raise err("weight literal outside signed 64-bit range", i)
            tokens.append(Token("int", value, line, col))
            i = j
            continue
        if ch in "|()*+?.:":
            tokens.append(Token("op", ch, line, col))
            i += 1
            continue
        raise err(f"unexpected character {ch!r}", i)

    line, col = _location(text, n)
    tokens.append(Token("eof", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> PatternSyntaxError:
        tok = tok or self.peek()
        return PatternSyntaxError(message, tok.line, tok.col)

    # --- grammar rules ---

    def union(self) -> Node:
        node = self.concat()
        while self.peek().kind == "op" and self.peek().value == "|":
            tok = self.advance()
            right = self.concat()
            node = Union(node, right, span=(tok.line, tok.col))
        return node

    def _starts_term(self, tok: Token) -> bool:
        if tok.kind in ("str", "class", "int"):
            return True
        return tok.kind == "op" and tok.value in "(.:"

    def concat(self) -> Node:
        node = self.term()
        while self._starts_term(self.peek()):
            right = self.term()
            node = Concat(node, right, span=node.span)
        return node

    def term(self) -> Node:
        leading: Token | None = None
        if self.peek().kind == "int":
            leading = self.advance()
            if not self._starts_term(self.peek()) or self.peek().kind == "int":
                raise self.error("expected an expression after weight literal")
        node = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "int":
                self.advance()
                node = WeightAfter(node, tok.value, span=(tok.line, tok.col))
            elif tok.kind == "op" and tok.value == "*":
                self.advance()
                node = Star(node, span=(tok.line, tok.col))
            elif tok.kind == "op" and tok.value == "+":
                self.advance()
                node = Plus(node, span=(tok.line, tok.col))
            elif tok.kind == "op" and tok.value == "?":
                self.advance()
                node = Question(node, span=(tok.line, tok.col))
            elif tok.kind == "op" and tok.value == ":":
                self.advance()
                out_tok = self.peek()
                if out_tok.kind != "str":
                    raise self.error("right side of ':' must be a string literal", out_tok)
                self.advance()
                # an alphabet annotation on an output literal has no meaning
                node = OutputConcat(node, out_tok.value[0], span=(tok.line, tok.col))
            else:
                break
        if leading is not None:
            node = WeightBefore(leading.value, node, span=(leading.line, leading.col))
        return node

    def factor(self) -> Node:
        tok = self.peek()
        span = (tok.line, tok.col)
        if tok.kind == "str":
            self.advance()
            value, annot = tok.value
            if not value:
                return Epsilon(span=span)
            node: Node | None = None
            for ch in value:
                atom = Atom(ord(ch), ord(ch), alphabet=annot, span=span)
                node = atom if node is None else Concat(node, atom, span=span)
            return node
        if tok.kind == "class":
            self.advance()
            lo, hi, annot = tok.value
            return Atom(lo, hi, alphabet=annot, span=span)
        if tok.kind == "op" and tok.value == ".":
            self.advance()
            return Dot(span=span)
        if tok.kind == "op" and tok.value == "(":
            self.advance()
            node = self.union()
            close = self.peek()
            if close.kind != "op" or close.value != ")":
                raise self.error("expected ')'", close)
            self.advance()
            return node
        if tok.kind == "op" and tok.value == ":":
            # shorthand: a term may start with ':' STRING, an output attached
            # to the empty word
            return Epsilon(span=span)
        raise self.error(f"expected an expression, found {_describe(tok)}", tok)


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    if tok.kind == "op":
        return f"'{tok.value}'"
    return tok.kind


def parse(text: str) -> Node:
    """Parse concrete syntax into a tree (sugar kinds included).

    Raises PatternSyntaxError with a 1-based line:column location.
    """
    parser = _Parser(tokenize(text))
    node = parser.union()
    if parser.peek().kind != "eof":
        raise parser.error(f"unexpected {_describe(parser.peek())}")
    return node
