"""Native binary64 evaluation and bit-exact comparison against the model.

``raw_eval`` runs an expression with host double arithmetic, the way a raw
Lisp redefinition would.  ``diff_check`` compares it with ``model_eval``;
a MISMATCH is an observable divergence between what the logic claims and
what execution produces.

The host must do binary64 arithmetic with round-to-nearest-even and no
extended-precision intermediates.  :func:`host_self_check` asserts this
before any raw evaluation.
"""

from __future__ import annotations

import contextlib
import enum
import gc
import math
import random
import struct
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .binary64 import (
    BINARY64,
    _encode,
    bits_to_value,
    dyadic,
    format_bits,
    fpp,
    rational_to_bits,
)
from .decimal_io import DecimalLiteral
from .errors import ModelFault
from .expr import Call, Dec, Expr, Num, model_eval, print_expr
from .ledger import recording
from .rounding import flipped_ties, fp_round

_PACK = struct.Struct("<d")
SIGN_BIT = 1 << 63


def float_to_bits(x: float) -> int:
    return int.from_bytes(_PACK.pack(x), "little")


def bits_to_float(bits: int) -> float:
    return _PACK.unpack(bits.to_bytes(8, "little"))[0]


class HostNotConformant(RuntimeError):
    pass


_host_checked = False


def host_self_check() -> None:
    """Refuse to run the oracle on a host whose doubles are not plain binary64."""
    global _host_checked
    if _host_checked:
        return
    problems = []
    if sys.float_info.mant_dig != 53 or sys.float_info.max_exp != 1024:
        problems.append("float is not binary64")
    if (0.1 + 0.2) + 0.3 != float.fromhex("0x1.3333333333334p-1"):
        problems.append("(0.1+0.2)+0.3 is not 0.6000000000000001")
    if 0.1 + (0.2 + 0.3) != float.fromhex("0x1.3333333333333p-1"):
        problems.append("0.1+(0.2+0.3) is not 0.6")
    if 1.0 + 2.0**-53 != 1.0 or 1.0 + 3 * 2.0**-53 != 1.0 + 2.0**-51:
        problems.append("ties are not broken to even")
    if float.fromhex("0x1p-1074") / 2 != 0.0:
        problems.append("subnormals are flushed or rounded wrongly")
    if problems:
        raise HostNotConformant("; ".join(problems))
    _host_checked = True


class Verdict(enum.Enum):
    MATCH = "MATCH"
    MISMATCH = "MISMATCH"
    MODEL_FAULT_RAW_SPECIAL = "MODEL_FAULT_RAW_SPECIAL"


@dataclass(frozen=True)
class DiffReport:
    expression: Expr
    model_bits: object  # int bit pattern, bool, or fault tag
    raw_bits: object  # int bit pattern or bool
    verdict: Verdict

    def to_line(self) -> str:
        return "\t".join(
            [self.verdict.value, _show(self.model_bits), _show(self.raw_bits), print_expr(self.expression)]
        )


def _show(v) -> str:
    if isinstance(v, bool):
        return "T" if v else "NIL"
    if isinstance(v, int):
        return format_bits(v)
    return str(v)


def _leaf_float(value: Fraction) -> float:
    """Host double for a rational leaf without any host rational conversion.

    A representable value is bit-encoded by the model.  Otherwise ``n/d`` with
    both parts exact doubles is one correctly rounded hardware division; only
    the remaining cases fall back to model rounding followed by encoding.
    """
    if fpp(value):
        return bits_to_float(_encode(value, BINARY64))
    n, d = value.numerator, value.denominator
    if fpp(n) and fpp(d):
        return float(n) / float(d)
    try:
        rounded = fp_round(value).result
    except ArithmeticError:
        return math.copysign(math.inf, n)
    return bits_to_float(rational_to_bits(rounded))


def _divide(a: float, b: float) -> float:
    if b == 0.0 or a != a or b != b:
        with np.errstate(all="ignore"):
            return float(np.float64(a) / np.float64(b))
    return a / b


def _sqrt(a: float) -> float:
    if a < 0.0 or a != a:
        with np.errstate(all="ignore"):
            return float(np.sqrt(np.float64(a)))
    return math.sqrt(a)


def _raw(expr: Expr):
    if isinstance(expr, Num):
        return _leaf_float(expr.value)
    if isinstance(expr, Dec):
        return float(expr.literal.text)
    op = expr.op
    if op == "to-fp":
        (arg,) = expr.args
        if isinstance(arg, Num):
            return _leaf_float(arg.value)
        x = _raw(arg)
        return math.nan if isinstance(x, bool) else x
    if op == "fpp":
        (arg,) = expr.args
        if isinstance(arg, Num):
            return _leaf_float(arg.value) == arg.value
        x = _raw(arg)
        return not isinstance(x, bool) and math.isfinite(x)
    args = [_raw(a) for a in expr.args]
    if op == "=":
        return args[0] == args[1]
    args = [math.nan if isinstance(a, bool) else a for a in args]
    if op == "fp+":
        return args[0] + args[1]
    if op == "fp-":
        return args[0] - args[1]
    if op == "fp*":
        return args[0] * args[1]
    if op == "fp/":
        return _divide(args[0], args[1])
    if op == "fp-sqrt":
        return _sqrt(args[0])
    raise ValueError(f"unknown operator {op!r}")


def raw_eval(expr: Expr):
    """Evaluate entirely in host binary64; returns a Binary64Value or a bool."""
    host_self_check()
    result = _raw(expr)
    if isinstance(result, bool):
        return result
    return bits_to_value(float_to_bits(result))


def diff_check(expr: Expr, ledger=None) -> DiffReport:
    host_self_check()
    try:
        model = model_eval(expr, ledger)
        model_fault = None
    except ModelFault as fault:
        model = None
        model_fault = fault
    raw = _raw(expr)
    raw_bits = raw if isinstance(raw, bool) else float_to_bits(raw)

    if model_fault is not None:
        special = not isinstance(raw, bool) and not math.isfinite(raw)
        verdict = Verdict.MODEL_FAULT_RAW_SPECIAL if special else Verdict.MISMATCH
        return DiffReport(expr, model_fault.tag, raw_bits, verdict)
    if isinstance(model, bool):
        verdict = Verdict.MATCH if model is raw else Verdict.MISMATCH
        return DiffReport(expr, model, raw_bits, verdict)
    model_bits = rational_to_bits(model)
    if isinstance(raw, bool):
        return DiffReport(expr, model_bits, raw_bits, Verdict.MISMATCH)
    same = model_bits == (0 if raw_bits == SIGN_BIT else raw_bits)
    return DiffReport(expr, model_bits, raw_bits, Verdict.MATCH if same else Verdict.MISMATCH)


class Generator(enum.Enum):
    UNIFORM_BITS = "uniform-bits"
    SMALL_RATIONAL = "small-rational"
    BOUNDARY = "boundary"


OPS = ("fp+", "fp-", "fp*", "fp/", "fp-sqrt")
OP_ALIASES = {"add": "fp+", "sub": "fp-", "mul": "fp*", "div": "fp/", "sqrt": "fp-sqrt"}


def resolve_ops(names) -> tuple[str, ...]:
    resolved = []
    for name in names:
        op = OP_ALIASES.get(name, name)
        if op not in OPS:
            raise ValueError(f"unknown fuzz operation {name!r}")
        resolved.append(op)
    if not resolved:
        raise ValueError("no operations selected")
    return tuple(resolved)


@dataclass(frozen=True)
class FuzzConfig:
    count: int
    seed: int = 0
    generator: Generator = Generator.UNIFORM_BITS
    ops: tuple[str, ...] = OPS
    workers: int = 1
    shard_size: int = 20_000
    flip_ties: bool = False  # fault injection: breaks the model on purpose

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")


@dataclass
class FuzzSummary:
    total: int = 0
    matches: int = 0
    mismatches: list[DiffReport] = field(default_factory=list)
    verdicts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def merge(self, other: "FuzzSummary") -> None:
        self.total += other.total
        self.matches += other.matches
        self.mismatches.extend(other.mismatches)
        for k, v in other.verdicts.items():
            self.verdicts[k] = self.verdicts.get(k, 0) + v


def _boundary_pool() -> list[Expr]:
    f = BINARY64
    tiny = f.min_subnormal
    values = {
        Fraction(0),
        tiny,
        2 * tiny,
        3 * tiny,
        f.min_normal - tiny,
        f.min_normal,
        f.min_normal + tiny,
        f.max_finite,
        f.max_finite - Fraction(2) ** 971,
        Fraction(2) ** 1023,
        Fraction(1),
        Fraction(3),
        Fraction(2) ** 53,
        Fraction(2) ** 53 + 2,
        1 + Fraction(2) ** -52,
        1 - Fraction(2) ** -53,
        Fraction(2) ** -53,
        Fraction(3, 2) * Fraction(2) ** -53,
        Fraction(2) ** -54,
        Fraction(2) ** -1022 * 3,
    }
    # powers of two across the whole exponent range
    values.update(Fraction(2) ** k for k in range(-1074, 1024, 7))
    pool: list[Expr] = []
    for v in sorted(values):
        pool.append(Num(v))
        if v:
            pool.append(Num(-v))
    pool.append(Dec(DecimalLiteral("-0.0", Fraction(0))))
    return pool


_BOUNDARY = None


def _operand(rng: random.Random, generator: Generator, nonnegative: bool) -> Expr:
    global _BOUNDARY
    if generator is Generator.UNIFORM_BITS:
        while True:
            bits = rng.getrandbits(64)
            if (bits >> 52) & 0x7FF != 0x7FF:
                break
        if nonnegative:
            bits &= ~SIGN_BIT
        return Num(bits_to_value(bits).value)
    if generator is Generator.SMALL_RATIONAL:
        n = rng.randint(-1000, 1000)
        d = rng.randint(1, 1000)
        if nonnegative:
            n = abs(n)
        return Num(fp_round(Fraction(n, d)).result)
    if _BOUNDARY is None:
        _BOUNDARY = _boundary_pool()
    leaf = rng.choice(_BOUNDARY)
    if nonnegative and isinstance(leaf, Num) and leaf.value < 0:
        leaf = Num(-leaf.value)
    return leaf


def _tie_pair(rng: random.Random) -> tuple[Expr, Expr]:
    """Operands whose exact sum or difference lies halfway between two doubles."""
    e = rng.randint(-1000, 1000)
    sig = rng.getrandbits(52) | (1 << 52)
    a = dyadic(sig, e - 52)
    half = dyadic(1, e - 53)
    if rng.getrandbits(1):
        a = -a
    if rng.getrandbits(1):
        half = -half
    return Num(a), Num(half)


def fuzz_case(config: FuzzConfig, rng: random.Random, index: int) -> Expr:
    op = config.ops[index % len(config.ops)]
    if op == "fp-sqrt":
        return Call(op, (_operand(rng, config.generator, True),))
    if config.generator is Generator.BOUNDARY and op in ("fp+", "fp-") and rng.random() < 0.25:
        return Call(op, _tie_pair(rng))
    a = _operand(rng, config.generator, False)
    b = _operand(rng, config.generator, False)
    return Call(op, (a, b))


@contextlib.contextmanager
def _collector_paused():
    # cases allocate many short-lived acyclic objects; full collections over a
    # large host heap would otherwise dominate the loop
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def _run_shard(args) -> FuzzSummary:
    config, shard, start, stop = args
    host_self_check()
    rng = random.Random(f"{config.seed}/{shard}")
    summary = FuzzSummary()
    with recording(None), _collector_paused():
        if config.flip_ties:
            with flipped_ties():
                _shard_loop(config, rng, start, stop, summary)
        else:
            _shard_loop(config, rng, start, stop, summary)
    return summary


def _shard_loop(config, rng, start, stop, summary) -> None:
    counts = summary.verdicts
    for index in range(start, stop):
        report = diff_check(fuzz_case(config, rng, index))
        key = report.verdict.value
        counts[key] = counts.get(key, 0) + 1
        summary.total += 1
        if report.verdict is Verdict.MISMATCH:
            summary.mismatches.append(report)
        else:
            summary.matches += 1


def fuzz(config: FuzzConfig) -> FuzzSummary:
    """Differential fuzzing of the model against host binary64.

    The case sequence depends only on ``seed``, ``generator``, ``ops``,
    ``count`` and ``shard_size``; worker count changes nothing but speed.
    A case counts as a match when its verdict is MATCH or
    MODEL_FAULT_RAW_SPECIAL.
    """
    shards = [
        (config, i, start, min(start + config.shard_size, config.count))
        for i, start in enumerate(range(0, config.count, config.shard_size))
    ]
    total = FuzzSummary()
    if config.workers > 1 and len(shards) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for part in pool.map(_run_shard, shards):
                total.merge(part)
    else:
        for shard in shards:
            total.merge(_run_shard(shard))
    return total


def write_reports(reports, sink) -> int:
    for report in reports:
        sink.write(report.to_line() + "\n")
    return len(reports)
