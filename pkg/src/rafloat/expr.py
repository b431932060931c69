"""S-expression surface syntax and model evaluation.

Grammar::

    expr    := literal | "(" op expr* ")"
    literal := integer | integer "/" digits | decimal
    op      := to-fp | fp+ | fp- | fp* | fp/ | fp-sqrt | fpp | =

Integers and ``n/d`` rationals are exact leaves.  A decimal literal such as
``0.1`` is read the way a Lisp reader set to double-float reads it, i.e. it
stands for ``to-fp`` of its exact value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import ops
from .binary64 import fpp
from .decimal_io import DecimalLiteral, is_decimal_literal
from .errors import GuardViolation, ModelFault
from .rational import format_rational
from .rounding import to_fp

ARITY = {
    "to-fp": 1,
    "fp-sqrt": 1,
    "fpp": 1,
    "fp+": 2,
    "fp-": 2,
    "fp*": 2,
    "fp/": 2,
    "=": 2,
}


@dataclass(frozen=True)
class Num:
    value: Fraction

    def __str__(self):
        return format_rational(self.value)


@dataclass(frozen=True)
class Dec:
    literal: DecimalLiteral

    def __str__(self):
        return self.literal.text


@dataclass(frozen=True)
class Call:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in ARITY:
            raise ValueError(f"unknown operator {self.op!r}")
        if len(self.args) != ARITY[self.op]:
            raise ValueError(f"{self.op} takes {ARITY[self.op]} argument(s), got {len(self.args)}")

    def __str__(self):
        return "(" + " ".join([self.op, *map(str, self.args)]) + ")"


Expr = Union[Num, Dec, Call]


def num(value) -> Num:
    return Num(Fraction(value))


def dec(text: str) -> Dec:
    return Dec(DecimalLiteral.parse(text))


def call(op: str, *args) -> Call:
    return Call(op, tuple(args))


def print_expr(expr: Expr) -> str:
    return str(expr)


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_INTEGER = re.compile(r"\A-?\d+\Z")
_RATIO = re.compile(r"\A(-?\d+)/(\d+)\Z")


def _tokenize(text: str):
    return [(m.group(), m.start()) for m in _TOKEN.finditer(text)]


def _atom(token: str, pos: int) -> Expr:
    if _INTEGER.match(token):
        return Num(Fraction(int(token)))
    m = _RATIO.match(token)
    if m:
        if int(m.group(2)) == 0:
            raise ExprSyntaxError("zero denominator", pos)
        return Num(Fraction(int(m.group(1)), int(m.group(2))))
    if is_decimal_literal(token):
        return Dec(DecimalLiteral.parse(token))
    if token in ARITY:
        raise ExprSyntaxError(f"operator {token} outside operator position", pos)
    raise ExprSyntaxError(f"unknown atom {token!r}", pos)


def parse_expr(text: str) -> Expr:
    """Parse one expression; ExprSyntaxError carries the offending position."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExprSyntaxError("empty input", 0)
    expr, i = _parse(tokens, 0, len(text))
    if i != len(tokens):
        raise ExprSyntaxError("trailing input", tokens[i][1])
    return expr


def _parse(tokens, i: int, end: int):
    if i >= len(tokens):
        raise ExprSyntaxError("unexpected end of input", end)
    token, pos = tokens[i]
    if token == ")":
        raise ExprSyntaxError("unbalanced ')'", pos)
    if token != "(":
        return _atom(token, pos), i + 1
    if i + 1 >= len(tokens):
        raise ExprSyntaxError("unbalanced '('", pos)
    op, op_pos = tokens[i + 1]
    if op in "()":
        raise ExprSyntaxError("expected operator", op_pos)
    if op not in ARITY:
        raise ExprSyntaxError(f"unknown operator {op!r}", op_pos)
    args = []
    i += 2
    while True:
        if i >= len(tokens):
            raise ExprSyntaxError("unbalanced '('", pos)
        if tokens[i][0] == ")":
            break
        arg, i = _parse(tokens, i, end)
        args.append(arg)
    if len(args) != ARITY[op]:
        raise ExprSyntaxError(f"{op} takes {ARITY[op]} argument(s), got {len(args)}", pos)
    return Call(op, tuple(args)), i + 1


_BINARY = {
    "fp+": ops.fp_add,
    "fp-": ops.fp_sub,
    "fp*": ops.fp_mul,
    "fp/": ops.fp_div,
}


def _rational_operand(op: str, value):
    if isinstance(value, bool) or not isinstance(value, Fraction):
        raise GuardViolation(op, value)
    return value


def model_eval(expr: Expr, ledger=None):
    """Evaluate under the rational model; returns a Fraction or a bool.

    Kernel calls record facts into ``ledger`` (or the active ledger).  Faults
    are ModelFault subclasses whose ``expr`` names the failing subexpression.
    """
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Dec):
        try:
            return to_fp(expr.literal.value, ledger=ledger)
        except ModelFault as fault:
            fault.expr = fault.expr or expr
            raise
    args = [model_eval(a, ledger) for a in expr.args]
    try:
        if expr.op == "to-fp":
            return to_fp(_rational_operand("to-fp", args[0]), ledger=ledger)
        if expr.op == "fpp":
            return fpp(args[0])
        if expr.op == "=":
            return _rational_operand("=", args[0]) == _rational_operand("=", args[1])
        if expr.op == "fp-sqrt":
            return ops.fp_sqrt(args[0], ledger=ledger)
        return _BINARY[expr.op](args[0], args[1])
    except ModelFault as fault:
        if fault.expr is None:
            fault.expr = expr
        raise
