import io
import math
import random
from dataclasses import replace
from fractions import Fraction

import pytest

from rafloat.binary64 import bits_to_value, rational_to_bits
from rafloat.expr import call, dec, num, parse_expr
from rafloat.ledger import Ledger, active_ledger, recording
from rafloat.oracle import (
    FuzzConfig,
    Generator,
    Verdict,
    bits_to_float,
    diff_check,
    float_to_bits,
    fuzz,
    fuzz_case,
    host_self_check,
    raw_eval,
    resolve_ops,
    write_reports,
)
from rafloat.rounding import flipped_ties

TRIPLE = "(fp+ (fp+ (to-fp 1/10) (to-fp 2/10)) (to-fp 3/10))"


def _raw_float(text):
    v = raw_eval(parse_expr(text))
    return bits_to_float(rational_to_bits(v.value)) if v.is_finite else v


def test_host_self_check():
    host_self_check()


def test_bit_casts():
    for x in (0.0, -0.0, 1.0, 0.1, 5e-324, 1.7976931348623157e308, -math.inf):
        assert bits_to_float(float_to_bits(x)) == x
    assert float_to_bits(-0.0) == 1 << 63


def test_raw_transcript_values():
    assert _raw_float(TRIPLE) == 0.6000000000000001
    assert _raw_float("(fp+ (to-fp 1/10) (fp+ (to-fp 2/10) (to-fp 3/10)))") == 0.6
    assert _raw_float("(fp-sqrt (to-fp 4))") == 2.0
    assert _raw_float("(fp/ 1 3)") == 1 / 3
    assert _raw_float("(to-fp 1/3)") == 1 / 3


def test_raw_specials():
    assert raw_eval(parse_expr("(fp/ 1 0)")).cls.value == "+inf"
    assert raw_eval(parse_expr("(fp/ 0 0)")).cls.value == "nan"
    assert raw_eval(parse_expr("(fp-sqrt -1)")).cls.value == "nan"
    assert raw_eval(parse_expr("(fp* 1e300 1e300)")).cls.value == "+inf"
    assert raw_eval(parse_expr("(fpp 1/4)")) is True


@pytest.mark.parametrize(
    "text",
    [
        TRIPLE,
        "(fp+ 0.1 (fp+ 0.2 0.3))",
        "(fp/ 1 3)",
        "(fp- 1 1)",
        "(fp* 1/1024 1/1024)",
        "(fp-sqrt 2)",
        "(fp+ 1 1/9007199254740992)",
        "(fpp 1/4)",
        "(= 0.1 (to-fp 1/10))",
    ],
)
def test_diff_match(text):
    assert diff_check(parse_expr(text)).verdict is Verdict.MATCH


def test_diff_faults():
    report = diff_check(parse_expr("(fp* 1e300 1e300)"))
    assert report.verdict is Verdict.MODEL_FAULT_RAW_SPECIAL and report.model_bits == "OVERFLOW"
    assert diff_check(parse_expr("(fp/ 1 0)")).verdict is Verdict.MODEL_FAULT_RAW_SPECIAL
    assert diff_check(parse_expr("(fp-sqrt -4)")).verdict is Verdict.MODEL_FAULT_RAW_SPECIAL


def test_negative_zero_normalised():
    report = diff_check(call("fp*", dec("-0.0"), num(1)))
    assert report.raw_bits == 1 << 63 and report.model_bits == 0
    assert report.verdict is Verdict.MATCH


def test_raw_redefinition_diverges():
    report = diff_check(parse_expr("(= 1/3 (to-fp 1/3))"))
    assert report.model_bits is False and report.raw_bits is True
    assert report.verdict is Verdict.MISMATCH
    assert diff_check(parse_expr("(= 0.1 1/10)")).verdict is Verdict.MISMATCH


def test_flipped_ties_caught():
    expr = parse_expr("(fp+ 1 1/9007199254740992)")
    with flipped_ties():
        report = diff_check(expr)
    assert report.verdict is Verdict.MISMATCH
    assert report.model_bits == rational_to_bits(1 + Fraction(1, 2**52))
    assert report.raw_bits == float_to_bits(1.0)


def test_report_line():
    line = diff_check(parse_expr("(fp/ 1 3)")).to_line()
    assert line == "MATCH\t0x3FD5555555555555\t0x3FD5555555555555\t(fp/ 1 3)"
    sink = io.StringIO()
    assert write_reports([diff_check(parse_expr("(fp/ 1 3)"))], sink) == 1


def test_resolve_ops():
    assert resolve_ops(["add", "fp*", "sqrt"]) == ("fp+", "fp*", "fp-sqrt")
    with pytest.raises(ValueError):
        resolve_ops(["pow"])
    with pytest.raises(ValueError):
        resolve_ops([])


def test_case_sequence_depends_on_seed():
    config = FuzzConfig(count=50, seed=3)
    first = [fuzz_case(config, random.Random("3/0"), i) for i in range(50)]
    second = [fuzz_case(config, random.Random("3/0"), i) for i in range(50)]
    other = [fuzz_case(config, random.Random("4/0"), i) for i in range(50)]
    assert first == second and first != other
    assert {c.op for c in first} == {"fp+", "fp-", "fp*", "fp/", "fp-sqrt"}


@pytest.mark.parametrize("generator", list(Generator))
def test_generators_agree_with_host(generator):
    summary = fuzz(FuzzConfig(count=4000, seed=1, generator=generator))
    assert summary.total == 4000
    assert summary.ok, [r.to_line() for r in summary.mismatches[:5]]


def test_fuzz_does_not_record():
    ledger = Ledger()
    with recording(ledger):
        fuzz(FuzzConfig(count=200, generator=Generator.SMALL_RATIONAL))
        assert active_ledger() is ledger
    assert len(ledger) == 0


def test_workers_do_not_change_results():
    config = FuzzConfig(count=600, seed=5, generator=Generator.BOUNDARY, shard_size=150, flip_ties=True)
    serial = fuzz(config)
    parallel = fuzz(replace(config, workers=2))
    assert serial.verdicts == parallel.verdicts
    assert [r.to_line() for r in serial.mismatches] == [r.to_line() for r in parallel.mismatches]


def test_tie_mutation_detected():
    config = FuzzConfig(count=1000, seed=0, generator=Generator.BOUNDARY, ops=("fp+", "fp-"))
    assert fuzz(config).ok
    mutated = fuzz(replace(config, flip_ties=True))
    assert len(mutated.mismatches) >= 1


def test_count_validation():
    with pytest.raises(ValueError):
        FuzzConfig(count=0)


def test_uniform_bits_cover_subnormals():
    config = FuzzConfig(count=2000, seed=2, ops=("fp*",))
    rng = random.Random("2/0")
    leaves = [a.value for i in range(2000) for a in fuzz_case(config, rng, i).args]
    assert any(v and abs(v) < Fraction(2) ** -1022 for v in leaves)
    assert bits_to_value(0).value == 0
