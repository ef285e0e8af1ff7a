"""Formula AST, text grammar, parser and printer.

The object language keeps only the primitive connectives: atoms, falsum,
negation, conjunction and box, plus the extension operators (reachability
box, universal/existential/only modalities, dynamic conjunction, indicative
conditional, announcement).  Diamond, disjunction, material implication and
verum are accepted by the parser but desugared immediately, so no semantic
code ever sees them.

Grammar (ASCII, whitespace-insensitive)::

    form        := imp ("=>" form)?
    imp         := or ("->" imp)?
    or          := and ("|" and)*
    and         := seq ("&" seq)*
    seq         := unary (";" unary)*
    unary       := "~" unary | "[]" unary | "<>" unary | "[*]" unary
                 | "A" unary | "E" unary | "O" unary
                 | "<" form ">" unary | atomOrGroup
    atomOrGroup := ident | "false" | "true" | "(" form ")"

Identifiers match ``[a-z][a-zA-Z0-9_]*``; ``false``, ``true``, ``A``, ``E``
and ``O`` are reserved.  Binary connectives are left-associative except
``->`` and ``=>`` which associate to the right.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator


class Formula:
    """Base class for AST nodes. All nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    child: Formula


@dataclass(frozen=True)
class BoxPlus(Formula):
    """Truth at every world reachable in finitely many steps (including zero)."""

    child: Formula


@dataclass(frozen=True)
class Univ(Formula):
    """Universal modality: truth at every world of the model."""

    child: Formula


@dataclass(frozen=True)
class Exist(Formula):
    """Existential modality, the dual of Univ."""

    child: Formula


@dataclass(frozen=True)
class Only(Formula):
    """True at w iff the argument holds at w and nowhere else."""

    child: Formula


@dataclass(frozen=True)
class Seq(Formula):
    """Dynamic conjunction: evaluate left, then right in the relativized model."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class Arrow(Formula):
    """Indicative conditional of update semantics."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class Announce(Formula):
    """Announcement <left>right; shares its truth clause with Seq."""

    announced: Formula
    body: Formula


# Derived connectives exist only as builders; they return primitive ASTs.

def top() -> Formula:
    return Not(Bottom())


def diamond(f: Formula) -> Formula:
    return Not(Box(Not(f)))


def disj(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


class Fragment(enum.IntEnum):
    """Language fragments, totally ordered by inclusion."""

    MODAL_FREE = 0
    BASIC = 1
    DYNAMIC = 2
    EXTENDED = 3


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield f and every subformula, depth-first."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (Not, Box, BoxPlus, Univ, Exist, Only)):
            stack.append(g.child)
        elif isinstance(g, (And, Seq, Arrow)):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Announce):
            stack.append(g.announced)
            stack.append(g.body)


def atoms(f: Formula) -> frozenset[str]:
    """The set of atom names occurring in f."""
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def fragment_of(f: Formula) -> Fragment:
    """Least fragment containing f."""
    level = Fragment.MODAL_FREE
    for g in subformulas(f):
        if isinstance(g, Box):
            level = max(level, Fragment.BASIC)
        elif isinstance(g, (Seq, Arrow)):
            level = max(level, Fragment.DYNAMIC)
        elif isinstance(g, (BoxPlus, Univ, Exist, Only, Announce)):
            return Fragment.EXTENDED
    return level


def modal_depth(f: Formula) -> int:
    """Nesting depth of modal operators (box-like, dynamic and announcement)."""
    if isinstance(f, (Atom, Bottom)):
        return 0
    if isinstance(f, (Not,)):
        return modal_depth(f.child)
    if isinstance(f, And):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Box, BoxPlus, Univ, Exist, Only)):
        return 1 + modal_depth(f.child)
    if isinstance(f, (Seq, Arrow)):
        return 1 + max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Announce):
        return 1 + max(modal_depth(f.announced), modal_depth(f.body))
    raise TypeError(f"not a formula: {f!r}")


class ParseError(ValueError):
    """Syntax error with a character offset into the input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<boxplus>\[\*\])
  | (?P<box>\[\])
  | (?P<diamond><>)
  | (?P<darrow>=>)
  | (?P<imp>->)
  | (?P<ident>[a-z][a-zA-Z0-9_]*)
  | (?P<op>[~&|;()<>AEO])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"false", "true"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unknown token {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in _KEYWORDS:
                kind = value
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}" if tok[1] else f"expected {kind!r}, found end of input", tok[2])
        return tok

    def form(self) -> Formula:
        left = self.imp()
        if self.peek()[0] == "darrow":
            self.take()
            return Arrow(left, self.form())
        return left

    def imp(self) -> Formula:
        left = self.or_()
        if self.peek()[0] == "imp":
            self.take()
            return implies(left, self.imp())
        return left

    def or_(self) -> Formula:
        left = self.and_()
        while self.peek()[1] == "|":
            self.take()
            left = disj(left, self.and_())
        return left

    def and_(self) -> Formula:
        left = self.seq()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.seq())
        return left

    def seq(self) -> Formula:
        left = self.unary()
        while self.peek()[1] == ";":
            self.take()
            left = Seq(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, value, offset = self.peek()
        if value == "~":
            self.take()
            return Not(self.unary())
        if kind == "box":
            self.take()
            return Box(self.unary())
        if kind == "diamond":
            self.take()
            return diamond(self.unary())
        if kind == "boxplus":
            self.take()
            return BoxPlus(self.unary())
        if value == "A":
            self.take()
            return Univ(self.unary())
        if value == "E":
            self.take()
            return Exist(self.unary())
        if value == "O":
            self.take()
            return Only(self.unary())
        if value == "<":
            self.take()
            announced = self.form()
            tok = self.take()
            if tok[1] != ">":
                raise ParseError("expected '>' closing announcement", tok[2])
            return Announce(announced, self.unary())
        return self.atom_or_group()

    def atom_or_group(self) -> Formula:
        kind, value, offset = self.take()
        if kind == "ident":
            return Atom(value)
        if kind == "false":
            return Bottom()
        if kind == "true":
            return top()
        if value == "(":
            f = self.form()
            tok = self.take()
            if tok[1] != ")":
                raise ParseError("expected ')'", tok[2])
            return f
        if kind == "eof":
            raise ParseError("unexpected end of input", offset)
        raise ParseError(f"unexpected token {value!r}", offset)


def parse(text: str) -> Formula:
    """Parse text into a desugared AST.

    Raises ParseError with the failing offset on malformed input.
    """
    p = _Parser(text)
    f = p.form()
    kind, value, offset = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected token {value!r} after formula", offset)
    return f


# Precedence levels used by the printer; higher binds tighter.
_PREC_ARROW = 1
_PREC_AND = 4
_PREC_SEQ = 5
_PREC_UNARY = 6


def render(f: Formula, full_parens: bool = False) -> str:
    """Print a formula so that parse(render(f)) == f.

    With full_parens every compound subformula is parenthesized, which is
    handy when eyeballing desugared output.
    """
    return _render(f, 0, full_parens)


def _render(f: Formula, parent: int, full: bool) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Not):
        return _wrap("~" + _render(f.child, _PREC_UNARY, full), _PREC_UNARY, parent, full)
    if isinstance(f, Box):
        return _wrap("[]" + _render(f.child, _PREC_UNARY, full), _PREC_UNARY, parent, full)
    if isinstance(f, BoxPlus):
        return _wrap("[*]" + _render(f.child, _PREC_UNARY, full), _PREC_UNARY, parent, full)
    if isinstance(f, Univ):
        return _wrap("A " + _render(f.child, _PREC_UNARY, full), _PREC_UNARY, parent, full)
    if isinstance(f, Exist):
        return _wrap("E " + _render(f.child, _PREC_UNARY, full), _PREC_UNARY, parent, full)
    if isinstance(f, Only):
        return _wrap("O " + _render(f.child, _PREC_UNARY, full), _PREC_UNARY, parent, full)
    if isinstance(f, Announce):
        body = "<" + _render(f.announced, 0, full) + ">" + _render(f.body, _PREC_UNARY, full)
        return _wrap(body, _PREC_UNARY, parent, full)
    if isinstance(f, And):
        body = _render(f.left, _PREC_AND, full) + " & " + _render(f.right, _PREC_AND + 1, full)
        return _wrap(body, _PREC_AND, parent, full)
    if isinstance(f, Seq):
        body = _render(f.left, _PREC_SEQ, full) + ";" + _render(f.right, _PREC_SEQ + 1, full)
        return _wrap(body, _PREC_SEQ, parent, full)
    if isinstance(f, Arrow):
        body = _render(f.left, _PREC_ARROW + 1, full) + " => " + _render(f.right, _PREC_ARROW, full)
        return _wrap(body, _PREC_ARROW, parent, full)
    raise TypeError(f"not a formula: {f!r}")


def _wrap(body: str, prec: int, parent: int, full: bool) -> str:
    if prec < parent or (full and parent > 0):
        return "(" + body + ")"
    return body
