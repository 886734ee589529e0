"""A small expression language for framing entries.

Grammar (whitespace-insensitive, ASCII)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | var | func '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x1^2``
is ``-(x1^2)`` while ``2^-1`` is still accepted.  Variables are ``x1``,
``x2``, ... up to the declared dimension.  Evaluation is generic over the
scalar type: plain floats or :class:`~llg.jets.Jet2`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import jets
from .errors import (
    ArityError,
    DivisionByZero,
    ExprSyntaxError,
    UnknownIdentifier,
    VariableOutOfRange,
)

FUNCTIONS = tuple(sorted(jets.ELEMENTARY))


class Expr:
    """Base class of expression nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1-based


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_VAR = re.compile(r"x([1-9][0-9]*)")


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(pos, "number, identifier or operator", source)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source, dim):
        self.source = source
        self.dim = dim
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text or kind == "end":
            raise ExprSyntaxError(pos, repr(text), self.source)

    def parse(self):
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(pos, "end of input", self.source)
        return e

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            m = _VAR.fullmatch(val)
            if m:
                index = int(m.group(1))
                if index > self.dim:
                    raise VariableOutOfRange(val, self.dim)
                if self.peek()[:2] == ("op", "("):
                    raise ArityError(f"variable {val} is not callable")
                return Var(index)
            if val not in jets.ELEMENTARY:
                raise UnknownIdentifier(val)
            if self.peek()[:2] != ("op", "("):
                raise ArityError(f"function {val} takes exactly one argument")
            self.take()
            if self.peek()[:2] == ("op", ")"):
                raise ArityError(f"function {val} takes exactly one argument")
            arg = self.expr()
            if self.peek()[:2] == ("op", ","):
                raise ArityError(f"function {val} takes exactly one argument")
            self.expect(")")
            return Call(val, arg)
        if (kind, val) == ("op", "("):
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(pos, "number, variable, function call or '('", self.source)


def parse(source: str, dim: int) -> Expr:
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    if not source.isascii():
        raise ExprSyntaxError(next(i for i, c in enumerate(source) if not c.isascii()),
                              "ASCII character", source)
    return _Parser(source, dim).parse()


def evaluate(e: Expr, point):
    """Evaluate ``e`` at ``point``, a sequence of floats or jets."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.index > len(point):
            raise VariableOutOfRange(f"x{e.index}", len(point))
        return point[e.index - 1]
    if isinstance(e, Neg):
        return -evaluate(e.arg, point)
    if isinstance(e, BinOp):
        a = evaluate(e.left, point)
        b = evaluate(e.right, point)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if not isinstance(b, jets.Jet2) and b == 0:
                raise DivisionByZero("division by zero")
            return a / b
        return jets.power(a, b)
    if isinstance(e, Call):
        return jets.elem(e.fn, evaluate(e.arg, point))
    raise TypeError(f"not an expression node: {e!r}")


def variables(e: Expr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Neg):
        return variables(e.arg)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        return variables(e.arg)
    return set()


# precedence used by the printer: larger binds tighter
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    if isinstance(e, Num) and e.value < 0:
        return _PREC["neg"]
    return _PREC["atom"]


def _fmt_num(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def _wrap(e, cond):
    s = to_source(e)
    return f"({s})" if cond else s


def to_source(e: Expr) -> str:
    """Render ``e`` with the fewest parentheses that reparse to the same tree."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _prec(e.arg) < _PREC["neg"])
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            left = _wrap(e.left, _prec(e.left) < _PREC["atom"])
            right = _wrap(e.right, _prec(e.right) < _PREC["neg"])
            return f"{left}^{right}"
        left = _wrap(e.left, _prec(e.left) < p)
        right = _wrap(e.right, _prec(e.right) <= p)
        return f"{left} {e.op} {right}" if p == 1 else f"{left}*{right}" if e.op == "*" else f"{left}/{right}"
    raise TypeError(f"not an expression node: {e!r}")
