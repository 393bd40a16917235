"""Arithmetic expressions over ``x1, x2, x3`` used to describe quadrant fields.

Grammar (lowest to highest precedence)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' signed_integer)*
    atom    := number | name | name '(' sum ')' | '(' sum ')'

Numeric literals are kept as exact :class:`fractions.Fraction` values in the
tree; a literal divided by a literal is folded into a single rational, so
``259/1800`` stays exact until :meth:`Expression.evaluate`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

VARIABLES = ("x1", "x2", "x3")
FUNCTIONS = {"sqrt"}


class ExpressionError(ValueError):
    """Base class for parse and evaluation failures."""


class ParseError(ExpressionError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(ParseError):
    pass


class EvaluationError(ExpressionError, ArithmeticError):
    pass


# --------------------------------------------------------------------------
# AST nodes

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Num | Var | Neg | BinOp | Pow | Call

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


# --------------------------------------------------------------------------
# tokenizer

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, names: frozenset[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None, cls=ParseError):
        tok = tok or self.peek()
        return cls(message, _byte_offset(self.text, tok[2]))

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self) -> Node:
        node = self.sum()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return node

    def sum(self) -> Node:
        node = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.product())
        return node

    def product(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.unary()
            if op == "/" and isinstance(node, Num) and isinstance(right, Num):
                if right.value == 0:
                    node = BinOp(op, node, right)
                else:
                    node = Num(node.value / right.value)
            else:
                node = BinOp(op, node, right)
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            while self.peek()[0] == "op" and self.peek()[1] in "+-":
                if self.take()[1] == "-":
                    sign = -sign
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                raise self.error("exponent must be an integer literal", tok)
            node = Pow(node, sign * int(tok[1]))
        return node

    def atom(self) -> Node:
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            return Num(Fraction(value))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if value not in FUNCTIONS:
                    raise self.error(f"unknown function {value!r}", tok, UnknownIdentifier)
                self.take()
                arg = self.sum()
                self.expect(")")
                return Call(value, arg)
            if value not in self.names:
                raise self.error(f"unknown identifier {value!r}", tok, UnknownIdentifier)
            return Var(value)
        if kind == "op" and value == "(":
            node = self.sum()
            self.expect(")")
            return node
        raise self.error(f"unexpected {value or 'end of input'!r}", tok)


# --------------------------------------------------------------------------
# printing

def _fmt_num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _to_text(node: Node, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        # rationals and negative literals need grouping inside any operator
        if parent_prec and (node.value.denominator != 1 or node.value < 0):
            return f"({s})"
        return s
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({_to_text(node.arg)})"
    if isinstance(node, Pow):
        return f"{_to_text(node.base, 4)}^{node.exponent}"
    if isinstance(node, Neg):
        s = "-" + _to_text(node.operand, 3)
        return f"({s})" if parent_prec >= 3 or (parent_prec and right) else s
    prec = _PREC[node.op]
    s = f"{_to_text(node.left, prec)}{node.op}{_to_text(node.right, prec, True)}"
    # left-associative: an equal-precedence right child needs parentheses
    if prec < parent_prec or (prec == parent_prec and right):
        return f"({s})"
    return s


# --------------------------------------------------------------------------
# compilation to closures

def _sqrt(v: float) -> float:
    if v < 0:
        raise EvaluationError(f"sqrt of negative value {v!r}")
    return math.sqrt(v)


def _div(a: float, b: float) -> float:
    if b == 0:
        raise EvaluationError("division by zero")
    return a / b


def _pow(a: float, n: int) -> float:
    if n < 0 and a == 0:
        raise EvaluationError("division by zero")
    return a**n


def _compile(node: Node, bind: Mapping[str, float]) -> Callable[[float, float, float], float]:
    if isinstance(node, Num):
        c = float(node.value)
        return lambda x1, x2, x3: c
    if isinstance(node, Var):
        if node.name == "x1":
            return lambda x1, x2, x3: x1
        if node.name == "x2":
            return lambda x1, x2, x3: x2
        if node.name == "x3":
            return lambda x1, x2, x3: x3
        c = float(bind[node.name])
        return lambda x1, x2, x3: c
    if isinstance(node, Neg):
        f = _compile(node.operand, bind)
        return lambda x1, x2, x3: -f(x1, x2, x3)
    if isinstance(node, Call):
        f = _compile(node.arg, bind)
        return lambda x1, x2, x3: _sqrt(f(x1, x2, x3))
    if isinstance(node, Pow):
        f = _compile(node.base, bind)
        n = node.exponent
        return lambda x1, x2, x3: _pow(f(x1, x2, x3), n)
    lf = _compile(node.left, bind)
    rf = _compile(node.right, bind)
    if node.op == "+":
        return lambda x1, x2, x3: lf(x1, x2, x3) + rf(x1, x2, x3)
    if node.op == "-":
        return lambda x1, x2, x3: lf(x1, x2, x3) - rf(x1, x2, x3)
    if node.op == "*":
        return lambda x1, x2, x3: lf(x1, x2, x3) * rf(x1, x2, x3)
    return lambda x1, x2, x3: _div(lf(x1, x2, x3), rf(x1, x2, x3))


def _free_vars(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg,)):
        return _free_vars(node.operand)
    if isinstance(node, Call):
        return _free_vars(node.arg)
    if isinstance(node, Pow):
        return _free_vars(node.base)
    return _free_vars(node.left) | _free_vars(node.right)


class Expression:
    """Parsed expression with a compiled evaluator.

    ``params`` binds extra identifiers (model-file parameters) to numbers.
    """

    __slots__ = ("root", "params", "_fn", "_vars")

    def __init__(self, root: Node, params: Mapping[str, float] | None = None):
        self.root = root
        self.params = dict(params or {})
        self._vars = frozenset(_free_vars(root) & set(VARIABLES))
        self._fn = _compile(root, self.params)

    def __call__(self, x1: float, x2: float, x3: float) -> float:
        try:
            return self._fn(x1, x2, x3)
        except ZeroDivisionError as exc:
            raise EvaluationError("division by zero") from exc

    def evaluate(self, p) -> float:
        return self(float(p[0]), float(p[1]), float(p[2]))

    @property
    def is_constant(self) -> bool:
        return not self._vars

    @property
    def variables(self) -> frozenset[str]:
        return self._vars

    def to_text(self) -> str:
        return _to_text(self.root)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Expression({self.to_text()!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Expression) and self.root == other.root and self.params == other.params

    def __hash__(self) -> int:
        return hash(self.root)


def parse_expression(text: str, params: Mapping[str, float] | None = None) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    Raises :class:`ParseError` (with a byte offset) on malformed input and
    :class:`UnknownIdentifier` for names other than ``x1, x2, x3`` and the
    keys of ``params``.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    names = frozenset(VARIABLES) | frozenset(params or ())
    root = _Parser(text, names).parse()
    return Expression(root, params)


def constant(value) -> Expression:
    """Literal expression; floats are converted exactly."""
    v = Fraction(value)
    return Expression(Num(v) if v >= 0 else Neg(Num(-v)))
