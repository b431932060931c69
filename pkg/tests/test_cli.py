import pytest

from rafloat.cli import LEDGER_ENV, main
from rafloat.ledger import import_facts

TRIPLE = "(fp+ (fp+ (to-fp 1/10) (to-fp 2/10)) (to-fp 3/10))"


@pytest.fixture(autouse=True)
def _no_session_ledger(monkeypatch):
    monkeypatch.delenv(LEDGER_ENV, raising=False)


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_eval_modes(capsys):
    status, out, _ = run(capsys, "eval", TRIPLE, "--mode", "diff")
    assert status == 0
    assert out == "MATCH\tmodel=0x3FE3333333333334\traw=0x3FE3333333333334\t0.6000000000000001\n"
    status, out, _ = run(capsys, "eval", "(fp+ 0.1 (fp+ 0.2 0.3))", "--mode", "raw")
    assert (status, out) == (0, "0.6\n")
    status, out, _ = run(capsys, "eval", "(to-fp 1/3)")
    assert out == "6004799503160661/18014398509481984 0.3333333333333333\n"
    assert run(capsys, "eval", "(= 1 1.0)")[1] == "T\n"
    assert run(capsys, "eval", "(fpp 1/3)")[1] == "NIL\n"


def test_eval_faults_and_mismatch(capsys):
    status, out, _ = run(capsys, "eval", "(fp+ 1/3 1)")
    assert status == 1 and out == "fault: guard violation: fp+ requires fpp operands, got 1/3 in (fp+ 1/3 1)\n"
    status, out, _ = run(capsys, "eval", "(fp/ 1 0)")
    assert status == 1 and out.startswith("fault:")
    status, out, _ = run(capsys, "eval", "(= 1/3 (to-fp 1/3))", "--mode", "diff")
    assert status == 1 and out.startswith("MISMATCH")
    status, out, _ = run(capsys, "eval", "(fp* 1e300 1e300)", "--mode", "diff")
    assert status == 0 and out.startswith("MODEL_FAULT_RAW_SPECIAL")


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "(fp+ 1)"],
        ["eval", "(fp+ 1 2"],
        ["eval", "(frob 1)"],
        ["round", "abc"],
        ["round", "2/0"],
        ["fuzz", "--ops", "pow"],
        ["fuzz", "--count", "0"],
        ["bogus"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 2
    assert "error" in capsys.readouterr().err


def test_usage_error_prints_grammar(capsys):
    status, _, err = run(capsys, "eval", "(fp+ 1)")
    assert status == 2 and "expression grammar" in err and "position" in err


def test_round(capsys):
    status, out, _ = run(capsys, "round", "1/3")
    assert status == 0
    assert "result     6004799503160661/18014398509481984" in out
    assert "direction  DOWN" in out and "bits       0x3FD5555555555555" in out
    assert "direction  UP" in run(capsys, "round", "0.1")[1]
    assert "direction  EXACT" in run(capsys, "round", "0x3FF0000000000000")[1]
    status, out, _ = run(capsys, "round", "1e400")
    assert status == 1 and "OVERFLOW" in out
    assert run(capsys, "round", "0x7FF0000000000000")[0] == 2


def test_check_laws(capsys):
    status, out, _ = run(capsys, "check-laws", "--samples", "200")
    assert status == 0
    assert "add-associativity: counterexample (= (fp+ (fp+ (to-fp 1/10)" in out
    assert out.count("[expected]") == 4


def test_fuzz(capsys, tmp_path):
    status, out, _ = run(capsys, "fuzz", "--count", "1000", "--seed", "7")
    assert status == 0 and out.startswith("1000/1000 match")
    report = tmp_path / "mismatches.txt"
    status, out, _ = run(capsys, "fuzz", "--count", "1000", "--gen", "boundary", "--ops", "add,sub",
                         "--flip-ties", "--report", str(report))
    assert status == 1
    lines = report.read_text().splitlines()
    assert lines and all(line.startswith("MISMATCH\t") for line in lines)


def test_session_ledger_persists(capsys, monkeypatch, tmp_path):
    path = tmp_path / "session.facts"
    monkeypatch.setenv(LEDGER_ENV, str(path))
    assert run(capsys, "eval", TRIPLE)[0] == 0
    assert run(capsys, "eval", "(fp-sqrt 2)")[0] == 0
    assert run(capsys, "eval", TRIPLE)[0] == 0
    ledger = import_facts(path)
    assert len(ledger) == 4
    assert [f.seq for f in ledger.facts] == [1, 2, 3, 4]
    status, out, _ = run(capsys, "axioms", "check")
    assert (status, out) == (0, "consistent (4 facts)\n")

    exported = tmp_path / "copy.facts"
    assert run(capsys, "axioms", "export", str(exported))[0] == 0
    assert exported.read_text() == path.read_text()

    with open(path, "a") as fh:
        fh.write("5\tconstrained-to-fp\t1/2\t1/3\n")
    status, out, _ = run(capsys, "axioms", "check")
    assert status == 1 and out.endswith("1 violation(s)\n")


def test_axioms_check_file(capsys, tmp_path):
    path = tmp_path / "bad.facts"
    path.write_text("1\tconstrained-to-fp\t1/3\t6004799503160661/18014398509481984\n"
                    "2\tconstrained-to-fp\t1/3\t1/3\n")
    status, out, _ = run(capsys, "axioms", "check", "--file", str(path))
    assert status == 1 and "1 violation(s)" in out
    assert run(capsys, "axioms", "check")[1] == "consistent (0 facts)\n"


def test_conflicting_session_write(capsys, monkeypatch, tmp_path):
    path = tmp_path / "session.facts"
    path.write_text("1\tconstrained-to-fp\t1/3\t1/3\n")
    monkeypatch.setenv(LEDGER_ENV, str(path))
    status, _, err = run(capsys, "eval", "(to-fp 1/3)")
    assert status == 1 and "1/3" in err
