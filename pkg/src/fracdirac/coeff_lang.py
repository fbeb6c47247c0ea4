"""A small expression language for the coefficients p and r.

Formulas are written in the staircase value ``S`` (and, optionally, the
physical abscissa ``x``)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := primary ('^' factor)?
    primary := number | 'S' | 'x' | 'pi' | 'e'
             | name '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so
``-2^2 == -4`` and ``2^3^2 == 512``.  Evaluation works on floats and on
numpy arrays alike.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ExpressionSyntaxError, UnknownFunctionError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}


class Expr:
    """Base class of the syntax tree.  Nodes are immutable and hashable."""

    __slots__ = ()

    def evaluate(self, s_value, x_value=0.0):
        return eval_coefficient(self, s_value, x_value)

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Number(Expr):
    value: float


@dataclass(frozen=True)
class VarS(Expr):
    pass


@dataclass(frozen=True)
class VarX(Expr):
    pass


@dataclass(frozen=True)
class Pi(Expr):
    pass


@dataclass(frozen=True)
class E(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    arg: Expr


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number, name, op, end
    text: str
    offset: int


def _byte_offset(source: str, char_index: int) -> int:
    return len(source[:char_index].encode("utf-8"))


def tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExpressionSyntaxError(
                f"unexpected character {source[pos]!r}", _byte_offset(source, pos), source
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), _byte_offset(source, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(source, len(source))))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, expected: str, tok: _Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExpressionSyntaxError(f"expected {expected}, found {found}", tok.offset, self.source)

    def accept(self, *ops: str) -> str | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            self.i += 1
            return self.tokens[self.i - 1].text
        return None

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self.error("an operator or end of input")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while (op := self.accept("+", "-")) is not None:
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while (op := self.accept("*", "/")) is not None:
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.accept("^"):
            return BinOp("^", base, self.factor())
        return base

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError("number literal out of range", tok.offset, self.source)
            return Number(value)
        if tok.kind == "name":
            self.i += 1
            if self.tok.kind == "op" and self.tok.text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"unknown function {tok.text!r}", tok.offset, self.source
                    )
                self.i += 1
                arg = self.expr()
                if not self.accept(")"):
                    self.error("')'")
                return Call(tok.text, arg)
            if tok.text == "S":
                return VarS()
            if tok.text == "x":
                return VarX()
            if tok.text == "pi":
                return Pi()
            if tok.text == "e":
                return E()
            if tok.text in FUNCTIONS:
                self.error(f"'(' after {tok.text}")
            raise ExpressionSyntaxError(f"unknown identifier {tok.text!r}", tok.offset, self.source)
        if self.accept("("):
            node = self.expr()
            if not self.accept(")"):
                self.error("')'")
            return node
        self.error("a number, S, x, pi, e, a function call or '('")


def parse_coefficient(source: str) -> Expr:
    """Parse coefficient text into an :class:`Expr` tree."""
    if not isinstance(source, str):
        raise TypeError("coefficient source must be text")
    if not source.strip():
        raise ExpressionSyntaxError("empty expression", 0, source)
    return _Parser(source).parse()


# -- printing ----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def render(node: Expr) -> str:
    """Canonical text that reparses to a structurally identical tree."""
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, VarS):
        return "S"
    if isinstance(node, VarX):
        return "x"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, E):
        return "e"
    if isinstance(node, Call):
        return f"{node.name}({render(node.arg)})"
    if isinstance(node, Neg):
        inner = render(node.operand)
        if isinstance(node.operand, BinOp) and node.operand.op != "^":
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        left, right = render(node.left), render(node.right)
        if node.op == "^":
            # base must be a primary; exponent may be any factor
            if isinstance(node.left, (BinOp, Neg)):
                left = f"({left})"
            if isinstance(node.right, BinOp) and node.right.op != "^":
                right = f"({right})"
            return f"{left}^{right}"
        prec = _PREC[node.op]
        if isinstance(node.left, BinOp) and node.left.op != "^" and _PREC[node.left.op] < prec:
            left = f"({left})"
        if isinstance(node.right, BinOp) and node.right.op != "^" and _PREC[node.right.op] <= prec:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation --------------------------------------------------------------


def _check(node: Expr, value):
    if not np.all(np.isfinite(value)):
        raise EvaluationError(f"non-finite value in {render(node)!r}", node)
    return value


def _eval(node: Expr, s, x):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, VarS):
        return s
    if isinstance(node, VarX):
        return x
    if isinstance(node, Pi):
        return math.pi
    if isinstance(node, E):
        return math.e
    if isinstance(node, Neg):
        return -_eval(node.operand, s, x)
    if isinstance(node, BinOp):
        left = _eval(node.left, s, x)
        right = _eval(node.right, s, x)
        op = node.op
        if op == "+":
            return _check(node, np.add(left, right))
        if op == "-":
            return _check(node, np.subtract(left, right))
        if op == "*":
            return _check(node, np.multiply(left, right))
        if op == "/":
            if np.any(np.asarray(right) == 0):
                raise EvaluationError(f"division by zero in {render(node)!r}", node)
            return _check(node, np.divide(left, right))
        return _check(node, np.power(left, right))
    if isinstance(node, Call):
        arg = _eval(node.arg, s, x)
        if node.name == "ln" and np.any(np.asarray(arg) <= 0):
            raise EvaluationError(f"ln of non-positive value in {render(node)!r}", node)
        if node.name == "sqrt" and np.any(np.asarray(arg) < 0):
            raise EvaluationError(f"sqrt of negative value in {render(node)!r}", node)
        return _check(node, FUNCTIONS[node.name](arg))
    raise TypeError(f"not an expression node: {node!r}")


def eval_coefficient(expr: Expr, s_value, x_value=0.0):
    """Evaluate ``expr`` with ``S = s_value`` and ``x = x_value``.

    Scalars give a Python float; arrays broadcast and give an array.
    """
    scalar = np.ndim(s_value) == 0 and np.ndim(x_value) == 0
    s = np.float64(s_value) if scalar else np.asarray(s_value, dtype=float)
    x = np.float64(x_value) if scalar else np.asarray(x_value, dtype=float)
    with np.errstate(all="ignore"):
        out = _check(expr, _eval(expr, s, x))
    if scalar:
        return float(out)
    return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(s, x).shape).copy()


def uses_x(expr: Expr) -> bool:
    if isinstance(expr, VarX):
        return True
    if isinstance(expr, Neg):
        return uses_x(expr.operand)
    if isinstance(expr, BinOp):
        return uses_x(expr.left) or uses_x(expr.right)
    if isinstance(expr, Call):
        return uses_x(expr.arg)
    return False


def as_expr(value) -> Expr:
    """Accept either a parsed tree or coefficient text."""
    if isinstance(value, Expr):
        return value
    return parse_coefficient(str(value))
