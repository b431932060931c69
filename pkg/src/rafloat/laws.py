"""Testing algebraic laws of the model on sampled instances.

Each law is an expression family ``(= lhs rhs)``.  Commutativity, additive
identity and idempotence of ``to-fp`` hold; associativity of ``fp+`` does not,
and the checker is expected to produce a counterexample for it, starting with
the triple 0.1, 0.2, 0.3.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .binary64 import bits_to_value
from .errors import ModelFault
from .expr import Call, Expr, Num, call, model_eval, num
from .rounding import fp_round

LAWS = ("add-associativity", "add-commutativity", "add-identity", "round-idempotence")

# whether each law is expected to hold on every sample
EXPECTED = {
    "add-associativity": False,
    "add-commutativity": True,
    "add-identity": True,
    "round-idempotence": True,
}


@dataclass(frozen=True)
class LawReport:
    law: str
    holds: bool
    checked: int
    counterexample: Expr | None = None

    @property
    def as_expected(self) -> bool:
        return self.holds == EXPECTED[self.law]

    def describe(self) -> str:
        if self.holds:
            return f"{self.law}: holds on {self.checked} samples"
        return f"{self.law}: counterexample {self.counterexample}"


def _fp_sample(rng: random.Random) -> Fraction:
    """A representable value: half small decimals-ish, half uniform bit patterns."""
    if rng.random() < 0.5:
        return fp_round(Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))).result
    while True:
        bits = rng.getrandbits(64)
        if (bits >> 52) & 0x7FF != 0x7FF:
            return bits_to_value(bits).value


def _rational_sample(rng: random.Random) -> Fraction:
    scale = Fraction(2) ** rng.randint(-1100, 1000)
    return Fraction(rng.randint(-10**9, 10**9), rng.randint(1, 10**9)) * scale


def _agree(lhs: Expr, rhs: Expr, ledger) -> bool:
    """Both sides evaluate to the same value, or both fault the same way."""
    try:
        left = model_eval(lhs, ledger)
    except ModelFault as fault:
        left = ("fault", fault.tag)
    try:
        right = model_eval(rhs, ledger)
    except ModelFault as fault:
        right = ("fault", fault.tag)
    return left == right


def _instances(law: str, rng: random.Random, samples: int):
    if law == "add-associativity":
        a, b, c = (call("to-fp", num(Fraction(k, 10))) for k in (1, 2, 3))
        yield call("fp+", call("fp+", a, b), c), call("fp+", a, call("fp+", b, c))
        for _ in range(samples):
            a, b, c = (Num(_fp_sample(rng)) for _ in range(3))
            yield call("fp+", call("fp+", a, b), c), call("fp+", a, call("fp+", b, c))
    elif law == "add-commutativity":
        for _ in range(samples):
            a, b = Num(_fp_sample(rng)), Num(_fp_sample(rng))
            yield call("fp+", a, b), call("fp+", b, a)
    elif law == "add-identity":
        for _ in range(samples):
            a = Num(_fp_sample(rng))
            yield call("fp+", a, num(0)), a
    elif law == "round-idempotence":
        for _ in range(samples):
            r = Num(_rational_sample(rng))
            yield call("to-fp", call("to-fp", r)), call("to-fp", r)
    else:
        raise ValueError(f"unknown law {law!r}")


def check_law(law: str, samples: int = 10_000, seed: int = 0, ledger=None) -> LawReport:
    rng = random.Random(f"{law}/{seed}")
    checked = 0
    for lhs, rhs in _instances(law, rng, samples):
        checked += 1
        if not _agree(lhs, rhs, ledger):
            return LawReport(law, False, checked, Call("=", (lhs, rhs)))
    return LawReport(law, True, checked)


def check_laws(laws=LAWS, samples: int = 10_000, seed: int = 0, ledger=None) -> list[LawReport]:
    return [check_law(law, samples, seed, ledger) for law in laws]
