"""Tiny expression language for locality relations.

An expression talks about two variables, ``p`` (the predecessor's value)
and ``s`` (the process's own value)::

    ((p+s)%4)!=2 && (p!=0 || s!=0)

Precedence, loosest first: ``||``, ``&&``, ``!``, comparisons,
``+ -``, ``* %``, unary minus.  Arithmetic is over Python integers and
``%`` always returns a value in ``[0, |divisor|)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

__all__ = ["ExprError", "Expr", "parse_expr", "compile_expr"]


class ExprError(ValueError):
    """Raised for malformed or ill-typed relation expressions."""


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_]\w*)|"
    r"(?P<op>&&|\|\||==|!=|<=|>=|[-+*%<>!()]))"
)

_COMPARISONS = {
    "==": lambda x, y: x == y,
    "!=": lambda x, y: x != y,
    "<": lambda x, y: x < y,
    "<=": lambda x, y: x <= y,
    ">": lambda x, y: x > y,
    ">=": lambda x, y: x >= y,
}


def _mod(x: int, y: int) -> int:
    if y == 0:
        raise ExprError("modulo by zero")
    return x % abs(y)


_ARITH = {
    "+": lambda x, y: x + y,
    "-": lambda x, y: x - y,
    "*": lambda x, y: x * y,
    "%": _mod,
}


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Unary, Binary]


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprError(f"unexpected character {text[pos:].lstrip()[:1]!r} at offset {pos}")
        tokens.append(m.group(m.lastgroup))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExprError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.peek()
        if got != tok:
            raise ExprError(f"expected {tok!r}, got {got!r}")
        self.pos += 1

    def parse(self) -> Expr:
        node = self.disjunction()
        if self.peek() is not None:
            raise ExprError(f"unexpected token {self.peek()!r}")
        return node

    def disjunction(self) -> Expr:
        node = self.conjunction()
        while self.peek() == "||":
            self.take()
            node = Binary("||", node, self.conjunction())
        return node

    def conjunction(self) -> Expr:
        node = self.negation()
        while self.peek() == "&&":
            self.take()
            node = Binary("&&", node, self.negation())
        return node

    def negation(self) -> Expr:
        if self.peek() == "!":
            self.take()
            return Unary("!", self.negation())
        return self.comparison()

    def comparison(self) -> Expr:
        node = self.additive()
        if self.peek() in _COMPARISONS:
            op = self.take()
            node = Binary(op, node, self.additive())
            if self.peek() in _COMPARISONS:
                raise ExprError("comparisons do not chain; use &&")
        return node

    def additive(self) -> Expr:
        node = self.multiplicative()
        while self.peek() in ("+", "-"):
            op = self.take()
            node = Binary(op, node, self.multiplicative())
        return node

    def multiplicative(self) -> Expr:
        node = self.unary_minus()
        while self.peek() in ("*", "%"):
            op = self.take()
            node = Binary(op, node, self.unary_minus())
        return node

    def unary_minus(self) -> Expr:
        if self.peek() == "-":
            self.take()
            return Unary("-", self.unary_minus())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.take()
        if tok == "(":
            node = self.disjunction()
            if self.peek() != ")":
                raise ExprError("unbalanced parentheses")
            self.take()
            return node
        if tok.isdigit():
            return Num(int(tok))
        if tok in ("p", "s"):
            return Var(tok)
        if tok[0].isalpha() or tok[0] == "_":
            raise ExprError(f"unknown identifier {tok!r} (only p and s are defined)")
        if tok == ")":
            raise ExprError("unbalanced parentheses")
        raise ExprError(f"unexpected token {tok!r}")


def _typeof(node: Expr) -> str:
    """Return ``"int"`` or ``"bool"``, raising on ill-typed subterms."""
    if isinstance(node, (Num, Var)):
        return "int"
    if isinstance(node, Unary):
        want = "bool" if node.op == "!" else "int"
        if _typeof(node.operand) != want:
            raise ExprError(f"operator {node.op!r} expects a {want} operand")
        return want
    left, right = _typeof(node.left), _typeof(node.right)
    if node.op in ("&&", "||"):
        if left != "bool" or right != "bool":
            raise ExprError(f"operator {node.op!r} expects boolean operands")
        return "bool"
    if left != "int" or right != "int":
        raise ExprError(f"operator {node.op!r} expects integer operands")
    return "bool" if node.op in _COMPARISONS else "int"


def parse_expr(text: str) -> Expr:
    """Parse and type-check *text*; the result must be boolean."""
    node = _Parser(_tokenize(text)).parse()
    if _typeof(node) != "bool":
        raise ExprError("expression must be boolean at the top level")
    return node


def _build(node: Expr) -> Callable[[int, int], object]:
    if isinstance(node, Num):
        value = node.value
        return lambda p, s: value
    if isinstance(node, Var):
        return (lambda p, s: p) if node.name == "p" else (lambda p, s: s)
    if isinstance(node, Unary):
        inner = _build(node.operand)
        if node.op == "!":
            return lambda p, s: not inner(p, s)
        return lambda p, s: -inner(p, s)
    lhs, rhs = _build(node.left), _build(node.right)
    if node.op == "&&":
        return lambda p, s: lhs(p, s) and rhs(p, s)
    if node.op == "||":
        return lambda p, s: lhs(p, s) or rhs(p, s)
    fn = _COMPARISONS.get(node.op) or _ARITH[node.op]
    return lambda p, s: fn(lhs(p, s), rhs(p, s))


def compile_expr(text: str) -> Callable[[int, int], bool]:
    """Compile *text* into a predicate ``f(p, s) -> bool``."""
    fn = _build(parse_expr(text))
    return lambda p, s: bool(fn(p, s))
