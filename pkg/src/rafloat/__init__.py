"""IEEE binary64 floating point modeled as exact representable rationals.

Floating-point operations are the round-to-nearest-even image of exact
rational results.  Executed conversions are logged as facts in a ledger,
and a differential oracle compares every result bit-for-bit with the host's
native binary64 arithmetic.
"""

from .binary64 import (
    BINARY64,
    Binary64Value,
    FloatFormat,
    ValueClass,
    bits_to_value,
    enumerate_values,
    fpp,
    value_to_bits,
)
from .decimal_io import parse_decimal, shortest_decimal
from .errors import FaultKind, GuardViolation, ModelFault, RangeFault
from .expr import model_eval, parse_expr, print_expr
from .laws import check_laws
from .ledger import Fact, Ledger, LedgerConflict, check_consistency, export_facts, import_facts, recording
from .ops import fp_add, fp_div, fp_mul, fp_sqrt, fp_sub
from .oracle import DiffReport, FuzzConfig, Generator, Verdict, diff_check, fuzz, raw_eval
from .rounding import Direction, RoundOutcome, fp_round, round_generic_bruteforce, to_fp

__version__ = "0.1.0"
