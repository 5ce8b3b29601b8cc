"""A small smooth expression language over variables x1..xn.

Grammar (whitespace insignificant):

    expr     := term (("+"|"-") term)*
    term     := factor (("*"|"/") factor)*
    factor   := base ("^" exponent)?
    base     := number | variable | func "(" expr ")" | "(" expr ")" | "-" base
    exponent := ("-")? number
    variable := "x" digit+
    func     := "sin" | "cos" | "exp" | "log" | "sqrt"

Numbers are decimal literals with optional fraction and exponent.  A "^" with
a constant integer exponent becomes an integer-power node; a non-integer
constant exponent c rewrites a^c into exp(c*log(a)).  Non-smooth primitives
(abs, min, ...) are rejected outright.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .autodiff import SMOOTH_FUNCTIONS, Dual, EvaluationDomainError, powi


class ExpressionError(ValueError):
    """Base class for expression language failures."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ExprSyntaxError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    pass


class VariableIndexError(ExpressionError):
    pass


class NonSmoothPrimitiveError(ExpressionError):
    pass


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based; surface syntax is 1-based (x1, x2, ...)


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class FieldExpr:
    """Expression tree together with the declared number of variables."""

    root: object
    dim: int


NON_SMOOTH = {"abs", "min", "max", "sign", "floor", "ceil", "heaviside", "relu", "step"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinOp(val, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinOp(val, node, self.factor())
            else:
                return node

    def factor(self):
        node = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            exponent = self.exponent()
            node = _make_power(node, exponent)
        return node

    def exponent(self) -> float:
        sign = 1.0
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            sign = -1.0
            kind, val, pos = self.peek()
        if kind != "num":
            raise ExprSyntaxError("exponent must be a numeric constant", pos)
        self.advance()
        return sign * float(val)

    def base(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            return self.name(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "op" and val == "-":
            return Neg(self.base())
        raise ExprSyntaxError(f"unexpected token {val!r}", pos)

    def name(self, name: str, pos: int):
        m = re.fullmatch(r"x(\d+)", name)
        if m:
            index = int(m.group(1))
            if not 1 <= index <= self.dim:
                raise VariableIndexError(
                    f"variable {name} out of range for dimension {self.dim}", pos
                )
            return Var(index - 1)
        if name in SMOOTH_FUNCTIONS:
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return Call(name, arg)
        if name in NON_SMOOTH:
            raise NonSmoothPrimitiveError(
                f"{name} is not a smooth primitive and is not allowed", pos
            )
        raise UnknownIdentifierError(f"unknown identifier {name!r}", pos)


def _make_power(base, exponent: float):
    if float(exponent).is_integer():
        return Pow(base, int(exponent))
    # a^c == exp(c*log(a)) for constant non-integer c
    return Call("exp", BinOp("*", Num(exponent), Call("log", base)))


def parse(text: str, dim: int) -> FieldExpr:
    """Parse ``text`` over variables x1..x<dim> into an expression tree."""
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    root = _Parser(text, dim).parse()
    return FieldExpr(root, dim)


# ---------------------------------------------------------------------------
# Evaluation


def eval_tree(node, coords):
    """Evaluate a tree given per-variable payloads (floats, arrays or Duals)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return coords[node.index]
    if isinstance(node, Neg):
        return -eval_tree(node.operand, coords)
    if isinstance(node, BinOp):
        left = eval_tree(node.left, coords)
        right = eval_tree(node.right, coords)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if isinstance(right, Dual):
            return left / right  # Dual division checks for a zero value itself
        if np.any(np.asarray(right) == 0.0):
            raise EvaluationDomainError("division by zero")
        return left / right
    if isinstance(node, Pow):
        return powi(eval_tree(node.base, coords), node.exponent)
    if isinstance(node, Call):
        return SMOOTH_FUNCTIONS[node.func](eval_tree(node.arg, coords))
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_string(node) -> str:
    """Render a tree (or FieldExpr) to text that re-parses to an equal tree."""
    if isinstance(node, FieldExpr):
        return to_string(node.root)
    return _render(node, 0)


def _render(node, parent_prec: int) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Neg):
        inner = _render(node.operand, 3)
        text = f"-{inner}"
        return f"({text})" if parent_prec > 1 else text
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = _render(node.left, prec)
        # the grammar is left-associative: the right child of - and / needs
        # parens when it sits at the same precedence level
        right = _render(node.right, prec + (1 if node.op in "-/" else 0))
        text = f"{left} {node.op} {right}" if prec == 1 else f"{left}{node.op}{right}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(node, Pow):
        bare = isinstance(node.base, (Var, Call)) or (
            isinstance(node.base, Num) and node.base.value >= 0
        )
        base = _render(node.base, 4) if bare else f"({_render(node.base, 0)})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg, 0)})"
    raise TypeError(f"not an expression node: {node!r}")
