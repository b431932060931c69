"""Ledger of implicit axioms.

Each executed call of a kernel function (``constrained-to-fp`` or the square
root kernel) produces a :class:`Fact` equating the call with its result.
The ledger only ever holds facts for computations that were actually
performed.  A second, different result for the same call is a conflict: the
two facts together are contradictory.

On-disk form is one fact per line::

    seq<TAB>function<TAB>arg1,arg2,...<TAB>result
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import io
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, TextIO

from .rational import format_rational, parse_rational

TO_FP = "constrained-to-fp"
SQRT_KERNEL = "fp-sqrt-kernel"


@dataclass(frozen=True)
class Fact:
    function: str
    args: tuple[Fraction, ...]
    result: Fraction
    seq: int

    @property
    def key(self) -> tuple[str, tuple[Fraction, ...]]:
        return self.function, self.args

    def to_line(self) -> str:
        args = ",".join(format_rational(a) for a in self.args)
        return f"{self.seq}\t{self.function}\t{args}\t{format_rational(self.result)}"

    @classmethod
    def from_line(cls, line: str) -> "Fact":
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 4:
            raise ValueError(f"malformed fact line: {line!r}")
        seq, function, args, result = parts
        arg_values = tuple(parse_rational(a) for a in args.split(",")) if args else ()
        return cls(function, arg_values, parse_rational(result), int(seq))


class LedgerConflict(Exception):
    """Recording would make the ledger contradict itself."""

    def __init__(self, existing: Fact, function: str, args, result):
        super().__init__(
            f"conflict: {function}({', '.join(map(format_rational, args))}) already recorded as "
            f"{format_rational(existing.result)}, not {format_rational(result)}"
        )
        self.existing = existing
        self.attempted = (function, tuple(args), result)


class Ledger:
    """Append-only, deduplicating collection of facts; safe to share between threads."""

    def __init__(self, facts: Iterable[Fact] = ()):
        self._lock = threading.RLock()
        self._facts: list[Fact] = []
        self._index: dict[tuple, Fact] = {}
        # always empty; kept for fidelity with the encapsulation form
        self.supporters: tuple[str, ...] = ()
        for f in facts:
            self._append(f)

    def __len__(self) -> int:
        return len(self._facts)

    def __iter__(self):
        return iter(self.facts)

    def __eq__(self, other):
        if not isinstance(other, Ledger):
            return NotImplemented
        return self.facts == other.facts

    @property
    def facts(self) -> tuple[Fact, ...]:
        with self._lock:
            return tuple(self._facts)

    @property
    def next_seq(self) -> int:
        with self._lock:
            return self._facts[-1].seq + 1 if self._facts else 1

    def lookup(self, function: str, args) -> Fact | None:
        with self._lock:
            return self._index.get((function, tuple(args)))

    def record(self, function: str, args, result) -> Fact:
        """Record ``function(*args) = result``; a repeat of a known fact is a no-op.

        Raises LedgerConflict if the call is already recorded with another result.
        """
        args = tuple(Fraction(a) for a in args)
        result = Fraction(result)
        with self._lock:
            existing = self._index.get((function, args))
            if existing is not None:
                if existing.result != result:
                    raise LedgerConflict(existing, function, args, result)
                return existing
            fact = Fact(function, args, result, self.next_seq)
            self._append(fact)
            return fact

    def inject(self, function: str, args, result) -> Fact:
        """Append a fact without any check.  Test hook for corrupting a ledger."""
        with self._lock:
            fact = Fact(function, tuple(Fraction(a) for a in args), Fraction(result), self.next_seq)
            self._append(fact)
            return fact

    def _append(self, fact: Fact) -> None:
        if self._facts and fact.seq <= self._facts[-1].seq:
            raise ValueError(f"sequence numbers must increase: {fact.seq} after {self._facts[-1].seq}")
        self._facts.append(fact)
        self._index.setdefault(fact.key, fact)


class ViolationKind(enum.Enum):
    CONFLICT = "CONFLICT"
    FIXPOINT = "FIXPOINT"
    IDEMPOTENCE = "IDEMPOTENCE"


@dataclass(frozen=True)
class Violation:
    fact: Fact
    kinds: tuple[ViolationKind, ...]
    detail: str = ""

    def __str__(self):
        names = "+".join(k.value for k in self.kinds)
        return f"{names} at seq {self.fact.seq}: {self.fact.to_line()}" + (f" ({self.detail})" if self.detail else "")


def check_consistency(ledger: Ledger) -> list[Violation]:
    """Every fact that breaks a known constraint, one violation per offending fact.

    Checks that each call has a single result, that every result is
    representable, and that ``constrained-to-fp`` is idempotent on its
    recorded results.
    """
    from .binary64 import fpp
    from .rounding import fp_round

    first: dict[tuple, Fact] = {}
    violations = []
    for fact in ledger.facts:
        kinds = []
        notes = []
        prior = first.setdefault(fact.key, fact)
        if prior is not fact and prior.result != fact.result:
            kinds.append(ViolationKind.CONFLICT)
            notes.append(f"seq {prior.seq} gives {format_rational(prior.result)}")
        if not fpp(fact.result):
            kinds.append(ViolationKind.FIXPOINT)
        if fact.function == TO_FP:
            r = fact.result
            again = ledger.lookup(TO_FP, (r,))
            try:
                rounded = fp_round(r).result
            except ArithmeticError:
                rounded = None
            if rounded != r or (again is not None and again.result != r):
                kinds.append(ViolationKind.IDEMPOTENCE)
        if kinds:
            violations.append(Violation(fact, tuple(kinds), "; ".join(notes)))
    return violations


def export_facts(ledger: Ledger, sink) -> int:
    """Write every fact in sequence order to a path or text stream; returns the count."""
    facts = ledger.facts
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8") as fh:
            return _write(facts, fh)
    return _write(facts, sink)


def _write(facts, fh: TextIO) -> int:
    for fact in facts:
        fh.write(fact.to_line() + "\n")
    return len(facts)


def append_facts(facts: Iterable[Fact], path) -> int:
    with open(path, "a", encoding="utf-8") as fh:
        return _write(list(facts), fh)


def import_facts(source) -> Ledger:
    """Load a ledger written by :func:`export_facts`.

    Conflicting lines are kept as they are, so that a corrupted file shows
    up in :func:`check_consistency` rather than failing to load.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    elif isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        text = source.read()
    else:
        raise TypeError(f"cannot read facts from {type(source).__name__}")
    return Ledger(Fact.from_line(line) for line in text.splitlines() if line.strip())


_active: contextvars.ContextVar[Ledger | None] = contextvars.ContextVar("active_ledger", default=None)


def active_ledger() -> Ledger | None:
    return _active.get()


@contextlib.contextmanager
def recording(ledger: Ledger):
    """Route kernel facts from :func:`to_fp` and ``fp_sqrt`` into ``ledger``."""
    token = _active.set(ledger)
    try:
        yield ledger
    finally:
        _active.reset(token)


def resolve_ledger(ledger: Ledger | None) -> Ledger | None:
    return ledger if ledger is not None else _active.get()
