"""Command line behavior: verdicts, exit codes, output formats."""
from __future__ import annotations

import json
import subprocess
import sys

import pytest

from typel.cli import main
from typel.datalog import load_program
from conftest import fixture_path

EX1 = str(fixture_path("example1.kbt"))
EX1_AF = str(fixture_path("example1-af.kbt"))
EX4 = str(fixture_path("example4.kbt"))


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_entailed(capsys):
    code, out, _ = run(capsys, "check", EX1, "Young(mario)")
    assert code == 0
    assert out.strip() == "entailed"


def test_check_not_entailed(capsys):
    code, out, _ = run(capsys, "check", EX1, "(some hasHair.{Black})(luigi)")
    assert code == 1
    assert out.strip() == "not-entailed"


def test_check_records_format(capsys):
    code, out, _ = run(capsys, "check", EX1, "T(Student)(mario)", "--format", "records")
    assert code == 0
    record = json.loads(out)
    assert record == {"mode": "check", "query": "T(Student)(mario)", "verdict": "entailed"}


def test_check_rejects_inclusions(capsys):
    code, _, err = run(capsys, "check", EX1, "Student <= Young")
    assert code == 2
    assert "subsumes" in err


def test_subsumes(capsys):
    code, out, _ = run(capsys, "subsumes", EX1, "some friendOf.{mary} <= Young")
    assert code == 0
    code, out, _ = run(capsys, "subsumes", EX1, "T(Young and Italian) <= some hasHair.{Black}")
    assert code == 1


def test_consistent(capsys):
    code, out, _ = run(capsys, "consistent", EX1)
    assert (code, out.strip()) == (0, "consistent")


def test_normalize_output_reparses(capsys, tmp_path):
    code, out, _ = run(capsys, "normalize", EX1, "--mode", "general")
    assert code == 0
    from typel.parser import parse_kb

    parse_kb(out)  # well-formed .kbt text


def test_translate_dump_round_trips(capsys, tmp_path):
    dump_file = tmp_path / "program.dl"
    code, out, _ = run(capsys, "translate", EX1, "--dump-program", str(dump_file))
    assert code == 0
    program = load_program(out)
    assert len(program.rules) == 42
    assert dump_file.read_text() == out


def test_rc_ranks_rows(capsys):
    code, out, _ = run(capsys, "rc-ranks", EX1_AF)
    assert code == 0
    lines = out.strip().splitlines()
    assert "Student 0" in lines
    assert "Student and Nerd 1" in lines


def test_rc_ranks_query_concept(capsys):
    code, out, _ = run(capsys, "rc-ranks", EX4, "--concept", "D")
    assert code == 0
    assert "D 1" in out.strip().splitlines()


def test_rc_ranks_records(capsys):
    code, out, _ = run(capsys, "rc-ranks", EX1_AF, "--format", "records")
    assert code == 0
    rows = [json.loads(line) for line in out.strip().splitlines()]
    assert {"mode": "rc-ranks", "query": "Student", "verdict": "0"} in rows


def test_rc_check(capsys):
    code, out, _ = run(
        capsys, "rc-check", EX1_AF, "T(Young and Italian) <= some hasHair.{Black}"
    )
    assert (code, out.strip()) == (0, "in-closure")
    code, out, _ = run(capsys, "rc-check", EX1_AF, "T(Student and Nerd) <= MathHater")
    assert (code, out.strip()) == (1, "not-in-closure")


def test_rc_consistent(capsys):
    code, out, _ = run(capsys, "rc-consistent", EX1_AF)
    assert (code, out.strip()) == (0, "consistent")
    code, out, _ = run(capsys, "rc-consistent", str(fixture_path("rc_inconsistent.kbt")))
    assert (code, out.strip()) == (1, "inconsistent")


def test_rc_commands_reject_non_simple_kb(capsys):
    code, _, err = run(capsys, "rc-ranks", EX1)
    assert code == 2
    assert "not a simple KB" in err


def test_refute_none_found(capsys):
    code, out, _ = run(capsys, "refute", EX1, "Young(mario)")
    assert (code, out.strip()) == (0, "none-found")


def test_refute_prints_counter_model(capsys):
    code, out, _ = run(capsys, "refute", EX1, "(some hasHair.{Black})(luigi)")
    assert code == 1
    assert out.startswith("counter-model:")
    assert "luigi" in out


def test_refute_records(capsys):
    code, out, _ = run(
        capsys, "refute", EX1, "(some hasHair.{Black})(luigi)", "--format", "records"
    )
    assert code == 1
    assert json.loads(out)["verdict"] == "counter-model"


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "check", "no-such-file.kbt", "A(a)")
    assert code == 2
    assert "error:" in err


def test_parse_error_has_location(capsys, tmp_path):
    bad = tmp_path / "bad.kbt"
    bad.write_text("class A.\nA <= some.\n")
    code, _, err = run(capsys, "check", str(bad), "A(a)")
    assert code == 2
    assert f"{bad}:2:" in err


def test_undeclared_query_name_is_usage_error(capsys):
    code, _, err = run(capsys, "check", EX1, "Missing(mario)")
    assert code == 2
    assert "undeclared" in err


def test_installed_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "typel.cli", "check", EX1, "MathLover(tom)"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "entailed"
