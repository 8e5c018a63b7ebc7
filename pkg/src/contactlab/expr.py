"""Coefficient expressions: recursive-descent parser, printer and dual evaluation.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' signed_integer)?
    base   := number | ident | fn '(' expr ')' | '(' expr ')' | '-' base

Note that ``-x^2`` parses as ``(-x)^2`` because unary minus belongs to ``base``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import dual
from .errors import ParseError, UnknownIdentifier

FUNCTIONS = {
    "sin": dual.sin,
    "cos": dual.cos,
    "tan": dual.tan,
    "sinh": dual.sinh,
    "cosh": dual.cosh,
    "exp": dual.exp,
    "ln": dual.log,
    "sqrt": dual.sqrt,
    "abs": dual.absolute,
}

CONSTANTS = {"pi": math.pi, "π": math.pi, "e": math.e}


# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str  # canonical: "pi" or "e"

    @property
    def value(self):
        return CONSTANTS[self.name]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Num, Const, Var, Neg, BinOp, Pow, Call]


# tokens

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[^\W\d]\w*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(pos, "number, identifier or operator", source)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source, allowed):
        self.source = source
        self.allowed = allowed
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text, what=None):
        if self.tok.text != text or self.tok.kind == "end":
            raise ParseError(self.tok.pos, what or repr(text), self.source)
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self.tok.pos, "operator or end of input", self.source)
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            sign = 1
            if self.tok.kind == "op" and self.tok.text in "+-":
                sign = -1 if self.advance().text == "-" else 1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                raise ParseError(t.pos, "integer exponent", self.source)
            self.advance()
            node = Pow(node, sign * int(t.text))
        return node

    def base(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "op" and t.text == "-":
            self.advance()
            return Neg(self.base())
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "ident":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("(", f"'(' after {t.text}")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            if t.text in self.allowed:
                return Var(t.text)
            if t.text in CONSTANTS:
                return Const("pi" if t.text == "π" else t.text)
            raise UnknownIdentifier(t.text, t.pos)
        raise ParseError(t.pos, "number, identifier, '(' or '-'", self.source)


@dataclass(frozen=True)
class Expression:
    """A parsed coefficient function of the variables ``free_vars``."""

    ast: Node
    free_vars: tuple
    _fn: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_fn", compile_node(self.ast, {v: i for i, v in enumerate(self.free_vars)}))

    def __str__(self):
        return to_source(self.ast)

    def __call__(self, values):
        """Evaluate with ``values`` ordered like ``free_vars`` (arrays or duals)."""
        return self._fn(values)


def parse(source: str, allowed_vars: Sequence[str]) -> Expression:
    if not source or not source.strip():
        raise ParseError(0, "non-empty expression", source)
    allowed = tuple(allowed_vars)
    clash = [v for v in allowed if v in FUNCTIONS or v in CONSTANTS]
    if clash:
        raise ValueError(f"reserved names cannot be variables: {clash}")
    return Expression(_Parser(source, set(allowed)).parse(), allowed)


def evaluate(node: Node, env: dict):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, BinOp):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return dual.divide(a, b)
    if isinstance(node, Pow):
        return dual.power(evaluate(node.base, env), node.exponent)
    if isinstance(node, Call):
        return FUNCTIONS[node.fn](evaluate(node.arg, env))
    raise TypeError(f"not an expression node: {node!r}")


def compile_node(node: Node, index: dict):
    """Turn ``node`` into a closure over a value list; same arithmetic as :func:`evaluate`."""
    if isinstance(node, (Num, Const)):
        c = node.value
        return lambda v: c
    if isinstance(node, Var):
        i = index[node.name]
        return lambda v: v[i]
    if isinstance(node, Neg):
        a = compile_node(node.operand, index)
        return lambda v: -a(v)
    if isinstance(node, BinOp):
        a = compile_node(node.left, index)
        b = compile_node(node.right, index)
        if node.op == "+":
            return lambda v: a(v) + b(v)
        if node.op == "-":
            return lambda v: a(v) - b(v)
        if node.op == "*":
            return lambda v: a(v) * b(v)
        return lambda v: dual.divide(a(v), b(v))
    if isinstance(node, Pow):
        a, k = compile_node(node.base, index), node.exponent
        return lambda v: dual.power(a(v), k)
    if isinstance(node, Call):
        a, f = compile_node(node.arg, index), FUNCTIONS[node.fn]
        return lambda v: f(a(v))
    raise TypeError(f"not an expression node: {node!r}")


def to_source(node: Node) -> str:
    """Print ``node`` so that reparsing yields a structurally equal AST."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Neg):
        return f"-({to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Pow):
        return f"({to_source(node.base)})^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def eval_with_gradient(e: Expression, point):
    """Value and gradient of ``e`` at ``point`` (shape ``(nvars,)`` or ``(..., nvars)``).

    The gradient is assembled from one forward-mode dual pass per variable.
    """
    point = np.asarray(point, dtype=float)
    n = len(e.free_vars)
    if point.shape[-1] != n:
        raise ValueError(f"point has {point.shape[-1]} entries, expression has {n} variables")
    coords = [point[..., i] for i in range(n)]
    value = np.broadcast_to(np.asarray(e(coords), dtype=float), point.shape[:-1]).copy()
    grad = np.empty(point.shape)
    for i in range(n):
        tag = dual.new_tag()
        seeded = list(coords)
        seeded[i] = dual.Dual(tag, coords[i], 1.0)
        grad[..., i] = dual.derivative(e(seeded), tag)
    return value, grad
