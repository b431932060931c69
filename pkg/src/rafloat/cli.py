"""Command-line driver.

Exit status: 0 on success, 1 when a mismatch, fault or ledger violation is
found, 2 on usage errors.  If RAFLOAT_LEDGER names a ``.facts`` file, facts
recorded by an invocation are appended to it and ``axioms`` reads it.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .binary64 import bits_to_value, format_bits, parse_bits, rational_to_bits
from .decimal_io import DecimalSyntaxError, decimal_value, format_value, is_decimal_literal, shortest_decimal
from .errors import ModelFault, RangeFault
from .expr import ExprSyntaxError, model_eval, parse_expr
from .laws import check_laws
from .ledger import TO_FP, Ledger, LedgerConflict, append_facts, check_consistency, export_facts, import_facts, recording
from .oracle import FuzzConfig, Generator, Verdict, diff_check, fuzz, raw_eval, resolve_ops, write_reports
from .rational import format_rational, parse_rational
from .rounding import fp_round

LEDGER_ENV = "RAFLOAT_LEDGER"

GRAMMAR = """\
expression grammar:
  expr    := literal | ( op expr... )
  literal := integer | n/d | [-]digits[.digits][e[-]digits]
  op      := to-fp x | fp-sqrt x | fpp x | fp+ x y | fp- x y | fp* x y | fp/ x y | = x y
  decimal literals read as (to-fp <exact value>)

examples:
  rafloat eval "(fp+ (fp+ (to-fp 1/10) (to-fp 2/10)) (to-fp 3/10))" --mode diff
  rafloat round 1/3
  rafloat fuzz --count 1000 --seed 7 --gen boundary --ops add,sqrt
  rafloat axioms check
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(2, f"\n{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rafloat",
        description="binary64 values as exact rationals, checked against host hardware",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate one expression", epilog=GRAMMAR,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("expr")
    p.add_argument("--mode", choices=("model", "raw", "diff"), default="model")

    p = sub.add_parser("round", help="round a rational, decimal or 0x bit pattern to binary64")
    p.add_argument("value")

    p = sub.add_parser("check-laws", help="test algebraic laws on sampled instances")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fuzz", help="differential fuzzing against host binary64")
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gen", choices=[g.value for g in Generator], default=Generator.UNIFORM_BITS.value)
    p.add_argument("--ops", default="add,sub,mul,div,sqrt", help="comma-separated: add,sub,mul,div,sqrt")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", help="write mismatch records to this file")
    p.add_argument("--flip-ties", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("axioms", help="inspect the fact ledger")
    axioms = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = axioms.add_parser("export", help="write the session ledger to a .facts file")
    e.add_argument("path")
    c = axioms.add_parser("check", help="check the session ledger for violations")
    c.add_argument("--file", help="check this .facts file instead")
    return parser


def _print_value(value) -> str:
    if isinstance(value, bool):
        return "T" if value else "NIL"
    return f"{format_rational(value)} {shortest_decimal(value)}"


def cmd_eval(args, ledger: Ledger) -> int:
    expr = parse_expr(args.expr)
    if args.mode == "model":
        try:
            value = model_eval(expr, ledger)
        except ModelFault as fault:
            print(f"fault: {fault} in {fault.expr}")
            return 1
        print(_print_value(value))
        return 0
    if args.mode == "raw":
        value = raw_eval(expr)
        print(("T" if value else "NIL") if isinstance(value, bool) else format_value(value))
        return 0
    report = diff_check(expr, ledger)
    if isinstance(report.raw_bits, bool):
        shown = "T" if report.raw_bits else "NIL"
    else:
        shown = format_value(bits_to_value(report.raw_bits))
    model = report.model_bits
    model_text = format_bits(model) if isinstance(model, int) and not isinstance(model, bool) else str(model)
    raw_text = format_bits(report.raw_bits) if not isinstance(report.raw_bits, bool) else shown
    print(f"{report.verdict.value}\tmodel={model_text}\traw={raw_text}\t{shown}")
    return 0 if report.verdict is not Verdict.MISMATCH else 1


def _read_number(text: str) -> Fraction:
    if text.lower().startswith("0x"):
        v = bits_to_value(parse_bits(text))
        if not v.is_finite:
            raise ValueError(f"{text} encodes {v.cls.value}, which has no rational value")
        return v.value
    if "/" not in text and is_decimal_literal(text):
        return decimal_value(text)
    return parse_rational(text)


def cmd_round(args, ledger: Ledger) -> int:
    x = _read_number(args.value)
    try:
        outcome = fp_round(x)
    except RangeFault as fault:
        print(f"fault: {fault.kind.value} for {format_rational(x)}")
        return 1
    if ledger is not None:
        ledger.record(TO_FP, (x,), outcome.result)
    print(f"result     {format_rational(outcome.result)}")
    print(f"decimal    {shortest_decimal(outcome.result)}")
    print(f"direction  {outcome.direction.value}")
    print(f"bits       {format_bits(rational_to_bits(outcome.result))}")
    return 0


def cmd_check_laws(args, ledger: Ledger) -> int:
    ok = True
    for report in check_laws(samples=args.samples, seed=args.seed, ledger=ledger):
        expected = "expected" if report.as_expected else "UNEXPECTED"
        print(f"{report.describe()} [{expected}]")
        ok &= report.as_expected
    return 0 if ok else 1


def cmd_fuzz(args) -> int:
    config = FuzzConfig(
        count=args.count,
        seed=args.seed,
        generator=Generator(args.gen),
        ops=resolve_ops(s.strip() for s in args.ops.split(",") if s.strip()),
        workers=args.workers,
        flip_ties=args.flip_ties,
    )
    summary = fuzz(config)
    print(f"{summary.matches}/{summary.total} match")
    for verdict, count in sorted(summary.verdicts.items()):
        print(f"  {verdict}: {count}")
    for report in summary.mismatches[:10]:
        print(report.to_line())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            write_reports(summary.mismatches, fh)
    return 0 if summary.ok else 1


def cmd_axioms(args, ledger: Ledger) -> int:
    if args.action == "export":
        count = export_facts(ledger, args.path)
        print(f"{count} facts written to {args.path}")
        return 0
    target = import_facts(args.file) if args.file else ledger
    violations = check_consistency(target)
    if not violations:
        print(f"consistent ({len(target)} facts)")
        return 0
    for v in violations:
        print(v)
    print(f"{len(violations)} violation(s)")
    return 1


def _session_ledger() -> tuple[Ledger, str | None]:
    path = os.environ.get(LEDGER_ENV)
    if path and os.path.exists(path):
        return import_facts(path), path
    return Ledger(), path


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ledger, path = _session_ledger()
    first_new = ledger.next_seq
    try:
        with recording(ledger):
            if args.command == "eval":
                status = cmd_eval(args, ledger)
            elif args.command == "round":
                status = cmd_round(args, ledger)
            elif args.command == "check-laws":
                status = cmd_check_laws(args, ledger)
            elif args.command == "fuzz":
                status = cmd_fuzz(args)
            else:
                status = cmd_axioms(args, ledger)
    except (ExprSyntaxError, DecimalSyntaxError, ValueError, ZeroDivisionError) as err:
        print(f"rafloat: error: {err}", file=sys.stderr)
        print(GRAMMAR, file=sys.stderr)
        return 2
    except LedgerConflict as err:
        print(f"rafloat: {err}", file=sys.stderr)
        status = 1
    if path:
        append_facts((f for f in ledger.facts if f.seq >= first_new), path)
    return status


if __name__ == "__main__":
    sys.exit(main())
