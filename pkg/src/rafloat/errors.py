"""Faults raised by the logical model."""

from __future__ import annotations

import enum


class FaultKind(enum.Enum):
    OVERFLOW = "OVERFLOW"
    INVALID = "INVALID"


class ModelFault(Exception):
    """Base for errors raised while evaluating under model semantics.

    ``expr`` is filled in by the evaluator with the offending subexpression.
    """

    tag = "FAULT"

    def __init__(self, message: str):
        super().__init__(message)
        self.expr = None


class RangeFault(ModelFault, ArithmeticError):
    def __init__(self, kind: FaultKind, input, message: str | None = None):
        super().__init__(message or f"{kind.value}: {input}")
        self.kind = kind
        self.input = input

    @property
    def tag(self) -> str:
        return self.kind.value


class GuardViolation(ModelFault, ValueError):
    """An operand failed the operator's guard (typically ``fpp``)."""

    tag = "GUARD"

    def __init__(self, operator: str, operand):
        super().__init__(f"guard violation: {operator} requires fpp operands, got {operand}")
        self.operator = operator
        self.operand = operand
