"""Propositional syntax: formulas, literals, multiset contexts, parsing and printing."""

from __future__ import annotations

import re
from operator import attrgetter
from dataclasses import dataclass
from typing import Iterable, Iterator

RESERVED_ATOM = "__v"
ATOM_PATTERN = re.compile(r"[a-z][a-z0-9_]*\Z")

ATOM, NOT, AND, OR = 0, 1, 2, 3


class SyntaxErrorAt(ValueError):
    """Parse failure with a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class ReservedAtomError(ValueError):
    """The reserved atom used for the top/bot encodings appeared in user text."""


class Formula:
    """Immutable propositional formula; compare and hash by canonical text."""

    __slots__ = ("kind", "name", "left", "right", "key", "lit", "_hash", "_neg", "_atoms")

    def __init__(self, kind: int, name: str | None, left: "Formula | None", right: "Formula | None"):
        self.kind = kind
        self.name = name
        self.left = left
        self.right = right
        self.key = _render(self)
        self.lit = kind == ATOM or (kind == NOT and left.kind == ATOM)  # type: ignore[union-attr]
        self._hash = hash(self.key)
        self._neg = None
        self._atoms: frozenset[str] | None = None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Formula) and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Formula") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Formula({self.key!r})"

    def __str__(self) -> str:
        return self.key

    @property
    def operand(self) -> "Formula":
        return self.left  # type: ignore[return-value]

    def is_literal(self) -> bool:
        return self.lit

    def negated(self) -> "Formula":
        """The formula with one more negation in front (cached)."""
        if self._neg is None:
            self._neg = Formula(NOT, None, self, None)
        return self._neg

    def atoms(self) -> frozenset[str]:
        if self._atoms is None:
            self._fill_atoms()
        return self._atoms  # type: ignore[return-value]

    def _fill_atoms(self) -> None:
        """Cache atom sets bottom-up, reusing those already cached on subformulas."""
        stack = [self]
        while stack:
            f = stack[-1]
            if f._atoms is not None:
                stack.pop()
            elif f.kind == ATOM:
                f._atoms = frozenset((f.name,))  # type: ignore[arg-type]
                stack.pop()
            else:
                pending = [c for c in (f.left, f.right) if c is not None and c._atoms is None]
                if pending:
                    stack.extend(pending)
                    continue
                f._atoms = f.left._atoms if f.right is None else f.left._atoms | f.right._atoms  # type: ignore
                stack.pop()


_ATOMS: dict[str, Formula] = {}


def atom(name: str) -> Formula:
    f = _ATOMS.get(name)
    if f is None:
        f = Formula(ATOM, name, None, None)
        _ATOMS[name] = f
    return f


def neg(f: Formula) -> Formula:
    return f.negated()


def conj(a: Formula, b: Formula) -> Formula:
    return Formula(AND, None, a, b)


def disj(a: Formula, b: Formula) -> Formula:
    return Formula(OR, None, a, b)


def complement(lit: Formula) -> Formula:
    """Complement of a literal: p to ~p and ~p to p."""
    if lit.kind == ATOM:
        return lit.negated()
    if lit.kind == NOT and lit.left.kind == ATOM:  # type: ignore[union-attr]
        return lit.left  # type: ignore[return-value]
    raise ValueError(f"not a literal: {lit}")


def literal_atom(lit: Formula) -> str:
    return lit.name if lit.kind == ATOM else lit.left.name  # type: ignore[union-attr,return-value]


# -- printing ---------------------------------------------------------------

_PREC = {OR: 1, AND: 2, NOT: 3, ATOM: 4}


def _render(f: Formula) -> str:
    if f.kind == ATOM:
        return f.name  # type: ignore[return-value]
    if f.kind == OR and f.left.kind == ATOM and f.left.name == RESERVED_ATOM:  # type: ignore[union-attr]
        if f.right.kind == NOT and f.right.left.kind == ATOM and f.right.left.name == RESERVED_ATOM:  # type: ignore[union-attr]
            return "top"
    if f.kind == AND and f.left.kind == ATOM and f.left.name == RESERVED_ATOM:  # type: ignore[union-attr]
        if f.right.kind == NOT and f.right.left.kind == ATOM and f.right.left.name == RESERVED_ATOM:  # type: ignore[union-attr]
            return "bot"
    if f.kind == NOT:
        inner = f.left.key  # type: ignore[union-attr]
        if _prec_of(f.left) < _PREC[NOT]:  # type: ignore[arg-type]
            inner = f"({inner})"
        return "~" + inner
    op = " & " if f.kind == AND else " | "
    prec = _PREC[f.kind]
    left = f.left.key  # type: ignore[union-attr]
    right = f.right.key  # type: ignore[union-attr]
    if _prec_of(f.left) < prec:  # type: ignore[arg-type]
        left = f"({left})"
    if _prec_of(f.right) <= prec:  # type: ignore[arg-type]
        right = f"({right})"
    return left + op + right


def _prec_of(f: Formula) -> int:
    if f.key in ("top", "bot"):
        return _PREC[ATOM]
    return _PREC[f.kind]


def show(f: Formula) -> str:
    return f.key


_V = atom(RESERVED_ATOM)
TOP = disj(_V, neg(_V))
BOT = conj(_V, neg(_V))


# -- parsing ----------------------------------------------------------------

_NAME = re.compile(r"[a-z_][a-z0-9_]*")


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens: list[tuple[str, str, int, int]] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            line += 1
            line_start = pos + 1
            pos += 1
            continue
        if ch.isspace():
            pos += 1
            continue
        col = pos - line_start + 1
        m = _NAME.match(text, pos)
        if m:
            tokens.append(("name", m.group(0), line, col))
            pos = m.end()
        elif ch in "~&|()":
            tokens.append((ch, ch, line, col))
            pos += 1
        else:
            raise SyntaxErrorAt(f"unexpected character {ch!r}", line, col)
    tokens.append(("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_reserved: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_reserved = allow_reserved

    def peek(self) -> tuple[str, str, int, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> tuple[str, str, int, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise SyntaxErrorAt(f"expected {kind!r}, found {what}", tok[2], tok[3])
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.disjunction()
        self.take("end")
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] == "|":
            self.i += 1
            f = disj(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.i += 1
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok[0] == "~":
            self.i += 1
            return neg(self.unary())
        if tok[0] == "(":
            self.i += 1
            f = self.disjunction()
            self.take(")")
            return f
        if tok[0] == "name":
            self.i += 1
            name = tok[1]
            if name == "top":
                return TOP
            if name == "bot":
                return BOT
            if name == RESERVED_ATOM:
                if not self.allow_reserved:
                    raise ReservedAtomError(
                        f"reserved atom {RESERVED_ATOM} at line {tok[2]}, column {tok[3]}"
                    )
                return atom(name)
            if not ATOM_PATTERN.match(name):
                raise SyntaxErrorAt(f"invalid atom name {name!r}", tok[2], tok[3])
            return atom(name)
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise SyntaxErrorAt(f"unexpected {what}", tok[2], tok[3])


def parse_formula(text: str, allow_reserved: bool = False) -> Formula:
    """Parse the surface grammar; `top`/`bot` expand over the reserved atom."""
    return _Parser(text, allow_reserved).parse()


# -- measures ---------------------------------------------------------------


def complexity(f: Formula) -> int:
    """Logical complexity: literals count 1, negation is pushed through binaries."""
    if f.kind == ATOM:
        return 1
    if f.kind in (AND, OR):
        return complexity(f.left) + complexity(f.right) + 1  # type: ignore[arg-type]
    inner = f.left
    if inner.kind == ATOM:  # type: ignore[union-attr]
        return 1
    if inner.kind == NOT:  # type: ignore[union-attr]
        return complexity(inner.left) + 1  # type: ignore[union-attr,arg-type]
    return complexity(neg(inner.left)) + complexity(neg(inner.right)) + 1  # type: ignore[union-attr,arg-type]


# -- contexts ---------------------------------------------------------------


_BY_KEY = attrgetter("key")


class Context:
    """Finite multiset of formulas kept in canonical order."""

    __slots__ = ("items", "_hash")

    def __init__(self, items: Iterable[Formula] = ()):
        self.items: tuple[Formula, ...] = tuple(sorted(items, key=_BY_KEY))
        self._hash: int | None = None

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, f: object) -> bool:
        return f in self.items

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Context) and self.items == other.items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.items)
        return self._hash

    def __add__(self, other: "Context") -> "Context":
        return Context(self.items + other.items)

    def __repr__(self) -> str:
        return "Context(" + ", ".join(f.key for f in self.items) + ")"

    def to_set(self) -> frozenset[Formula]:
        return frozenset(self.items)

    def contracted(self) -> "Context":
        return Context(set(self.items))

    def remove_one(self, f: Formula) -> "Context":
        items = list(self.items)
        items.remove(f)
        return Context(items)

    def add(self, *fs: Formula) -> "Context":
        return Context(self.items + fs)

    def is_literal(self) -> bool:
        return all(f.is_literal() for f in self.items)

    def complexity(self) -> int:
        return sum(complexity(f) for f in self.items)

    def atoms(self) -> frozenset[str]:
        out: set[str] = set()
        for f in self.items:
            out |= f.atoms()
        return frozenset(out)

    def show(self) -> str:
        return ", ".join(f.key for f in self.items)


EMPTY = Context()


def perp(ctx: Context) -> Context:
    """Flip every literal; an involution on literal contexts."""
    for f in ctx:
        if not f.is_literal():
            raise ValueError(f"perp needs literals, got {f}")
    return Context(complement(f) for f in ctx)


def big_and(ctx: Iterable[Formula]) -> Formula:
    items = sorted(ctx, key=lambda f: f.key)
    if not items:
        return TOP
    out = items[-1]
    for f in reversed(items[:-1]):
        out = conj(f, out)
    return out


def big_or(ctx: Iterable[Formula]) -> Formula:
    items = sorted(ctx, key=lambda f: f.key)
    if not items:
        return BOT
    out = items[-1]
    for f in reversed(items[:-1]):
        out = disj(f, out)
    return out


# -- labelled formulas --------------------------------------------------------

TAGS = ("f", "o", "p")


@dataclass(frozen=True, order=True)
class LabelledFormula:
    formula: Formula
    tag: str

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")

    def show(self) -> str:
        f = self.formula
        body = f.key if f.is_literal() or f.key in ("top", "bot") or f.kind == NOT else f"({f.key})"
        return f"{body}^{self.tag}"


def parse_labelled(text: str) -> LabelledFormula:
    body, sep, tag = text.rpartition("^")
    if not sep:
        raise ValueError(f"labelled formula needs a ^tag suffix: {text!r}")
    return LabelledFormula(parse_formula(body, allow_reserved=True), tag.strip())
