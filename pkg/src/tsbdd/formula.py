"""Propositional formulas as an immutable AST, plus a small text parser.

Connectives: negation, conjunction, disjunction, implication,
bi-implication, n-ary exclusive-or (parity, associated left to right)
and if-then-else.  Formulas evaluate directly against an assignment,
independently of any diagram machinery, which makes the AST usable as
the ground truth in brute-force checks.

Text syntax (loosest binding first)::

    iff     :=  imp ('<=>' imp)*
    imp     :=  disj ('=>' disj)*          right associative
    disj    :=  xor ('|' xor)*
    xor     :=  conj ('^' conj)*
    conj    :=  unary ('&' unary)*
    unary   :=  '!' unary | primary
    primary :=  '0' | '1' | name | '(' iff ')' | 'ite' '(' iff ',' iff ',' iff ')'

Variable names match ``[A-Za-z_][A-Za-z0-9_]*`` (``ite`` is reserved).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping


class FormulaError(ValueError):
    """Raised for malformed formula text."""


class Formula:
    """Base class for formula nodes.  Instances are immutable."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __xor__(self, other: "Formula") -> "Formula":
        return Xor((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)

    def implies(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def iff(self, other: "Formula") -> "Formula":
        return Iff(self, other)

    def evaluate(self, assignment: Mapping[str, int]) -> bool:
        raise NotImplementedError

    def variables(self) -> set[str]:
        out: set[str] = set()
        stack: list[Formula] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                out.add(node.name)
            else:
                stack.extend(node._children())
        return out

    def _children(self) -> tuple["Formula", ...]:
        return ()


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def evaluate(self, assignment):
        return bool(assignment[self.name])


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def evaluate(self, assignment):
        return self.value


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def evaluate(self, assignment):
        return not self.arg.evaluate(assignment)

    def _children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def evaluate(self, assignment):
        return all(a.evaluate(assignment) for a in self.args)

    def _children(self):
        return self.args


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def evaluate(self, assignment):
        return any(a.evaluate(assignment) for a in self.args)

    def _children(self):
        return self.args


@dataclass(frozen=True)
class Xor(Formula):
    """Parity over the operands; expanded as a left-associated chain."""

    args: tuple[Formula, ...]

    def evaluate(self, assignment):
        acc = False
        for a in self.args:
            acc ^= a.evaluate(assignment)
        return acc

    def _children(self):
        return self.args


@dataclass(frozen=True)
class Implies(Formula):
    antecedent: Formula
    consequent: Formula

    def evaluate(self, assignment):
        return (not self.antecedent.evaluate(assignment)) or self.consequent.evaluate(assignment)

    def _children(self):
        return (self.antecedent, self.consequent)


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def evaluate(self, assignment):
        return self.left.evaluate(assignment) == self.right.evaluate(assignment)

    def _children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Ite(Formula):
    cond: Formula
    then: Formula
    other: Formula

    def evaluate(self, assignment):
        if self.cond.evaluate(assignment):
            return self.then.evaluate(assignment)
        return self.other.evaluate(assignment)

    def _children(self):
        return (self.cond, self.then, self.other)


def conjunction(parts) -> Formula:
    parts = tuple(parts)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def disjunction(parts) -> Formula:
    parts = tuple(parts)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><=>|=>|[01()&|^!,]))"
)


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise FormulaError(f"unexpected character {stripped[0]!r} at position {pos}")
        if m.group("name"):
            yield ("name", m.group("name"), m.start("name"))
        else:
            yield ("op", m.group("op"), m.start("op"))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, val, at = self.next()
        if val != value:
            raise FormulaError(f"expected {value!r} at position {at}, found {val!r}")

    def parse(self) -> Formula:
        node = self.iff()
        kind, val, at = self.peek()
        if kind is not None:
            raise FormulaError(f"trailing input {val!r} at position {at}")
        return node

    def iff(self) -> Formula:
        node = self.imp()
        while self.peek()[1] == "<=>":
            self.next()
            node = Iff(node, self.imp())
        return node

    def imp(self) -> Formula:
        node = self.disj()
        if self.peek()[1] == "=>":
            self.next()
            return Implies(node, self.imp())
        return node

    def disj(self) -> Formula:
        parts = [self.xor()]
        while self.peek()[1] == "|":
            self.next()
            parts.append(self.xor())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def xor(self) -> Formula:
        parts = [self.conj()]
        while self.peek()[1] == "^":
            self.next()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Xor(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek()[1] == "&":
            self.next()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.peek()[1] == "!":
            self.next()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, val, at = self.next()
        if kind is None:
            raise FormulaError("unexpected end of input")
        if val == "0":
            return FALSE
        if val == "1":
            return TRUE
        if val == "(":
            node = self.iff()
            self.expect(")")
            return node
        if kind == "name":
            if val == "ite":
                self.expect("(")
                cond = self.iff()
                self.expect(",")
                then = self.iff()
                self.expect(",")
                other = self.iff()
                self.expect(")")
                return Ite(cond, then, other)
            return Var(val)
        raise FormulaError(f"unexpected token {val!r} at position {at}")


def parse_formula(text: str) -> Formula:
    """Parse formula text into an AST.  Raises FormulaError on bad input."""
    return _Parser(text).parse()
