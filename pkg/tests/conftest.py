import struct
from fractions import Fraction

import pytest

_ACCEPTANCE = []


def host_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def host_float(bits: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", bits))[0]


def host_round(x: Fraction):
    """Host conversion of a rational to double, exact-valued; None on overflow.

    CPython converts Fractions by correctly rounded integer true division.
    """
    try:
        return Fraction(float(x))
    except OverflowError:
        return None


@pytest.fixture
def acceptance():
    def record(number, description, passed):
        _ACCEPTANCE.append((number, description, bool(passed)))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {description}")
