"""Low-level text utilities shared by the word, trace and term codecs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class FormatError(ValueError):
    """Error while parsing one of the text formats."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        if self.column is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"


class WordFormatError(FormatError):
    """Malformed braid word text."""

    pass


class TraceFormatError(FormatError):
    """Malformed reduction trace text."""

    pass


class TermParseError(FormatError):
    """Malformed term (S-expression) text."""

    pass


@dataclass(frozen=True)
class Token:
    """A lexical token with its 1-based source position."""

    kind: str  # "(", ")" or "atom"
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Atom:
    """A bare symbol in an S-expression."""

    text: str
    line: int
    column: int


@dataclass(frozen=True)
class SList:
    """A parenthesized list in an S-expression."""

    items: tuple["SExpr", ...]
    line: int
    column: int


SExpr = Union[Atom, SList]


def iter_tokens(source: str) -> Iterator[Token]:
    """Split S-expression text into tokens, tracking line and column."""
    line, column = 1, 1
    i = 0
    while i < len(source):
        ch = source[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch.isspace():
            column += 1
            i += 1
            continue
        if ch == ";":
            # comment to end of line
            while i < len(source) and source[i] != "\n":
                i += 1
            continue
        if ch in "()":
            yield Token(ch, ch, line, column)
            column += 1
            i += 1
            continue
        start_col = column
        start = i
        while i < len(source) and not source[i].isspace() and source[i] not in "();":
            i += 1
            column += 1
        yield Token("atom", source[start:i], line, start_col)


def read_sexpr(source: str) -> SExpr:
    """Parse exactly one S-expression from text.

    Raises:
        TermParseError: On unbalanced parentheses, empty input or trailing tokens.
    """
    tokens = list(iter_tokens(source))
    if not tokens:
        raise TermParseError("empty input", 1, 1)
    expr, pos = _read_at(tokens, 0)
    if pos != len(tokens):
        extra = tokens[pos]
        raise TermParseError(f"unexpected trailing token {extra.text!r}", extra.line, extra.column)
    return expr


def _read_at(tokens: list[Token], pos: int) -> tuple[SExpr, int]:
    token = tokens[pos]
    if token.kind == "atom":
        return Atom(token.text, token.line, token.column), pos + 1
    if token.kind == ")":
        raise TermParseError("unexpected ')'", token.line, token.column)
    items: list[SExpr] = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise TermParseError("unclosed '('", token.line, token.column)
        if tokens[pos].kind == ")":
            return SList(tuple(items), token.line, token.column), pos + 1
        item, pos = _read_at(tokens, pos)
        items.append(item)


def format_int_set(values: set[int] | frozenset[int]) -> str:
    """Render a set of generator indices as ``{1,2}``."""
    return "{" + ",".join(str(v) for v in sorted(values)) + "}"


def format_int_list(values: tuple[int, ...] | list[int]) -> str:
    """Render one-line notation as ``[3,2,1]``."""
    return "[" + ",".join(str(v) for v in values) + "]"
