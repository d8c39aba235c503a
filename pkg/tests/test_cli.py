import csv
import io
import json

import pytest

from qss_split.cli import EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_honest_report(capsys):
    code, out, _ = run(capsys, "--mode", "honest", "--rounds", "50", "--trials", "100", "--seed", "7")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["detection_rate"] == 0.0
    assert data["mode"] == "honest"


def test_attack_report(capsys):
    code, out, _ = run(capsys, "--mode", "attack", "--rounds", "12", "--trials", "200",
                       "--compare-fraction", "0.5", "--seed", "7")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["detection_rate"] == 0.0
    assert data["stealth_failure_count"] == 0
    assert data["round2_check_pass_rate"] == 1.0


def test_verify_equations_text(capsys):
    code, out, _ = run(capsys, "--mode", "verify-equations", "--format", "text")
    assert code == EXIT_OK
    assert "FAIL" not in out and "SKIP" not in out
    assert "53/53 checks passed" in out


def test_verify_equations_json(capsys):
    code, out, _ = run(capsys, "--mode", "verify-equations")
    data = json.loads(out)
    assert data["all_pass"] is True
    assert len(data["checks"]) == 53


def test_csv_output_to_file(tmp_path, capsys):
    path = tmp_path / "report.csv"
    code, out, _ = run(capsys, "--mode", "attack", "--rounds", "6", "--trials", "15", "--format", "csv",
                       "--out", str(path))
    assert code == EXIT_OK and out == ""
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 15
    assert {r["detected"] for r in rows} == {"0"}


def test_reports_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["--mode", "attack", "--rounds", "8", "--trials", "40", "--seed", "3", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["--mode", "attack", "--rounds", "1"],
        ["--mode", "honest", "--rounds", "0"],
        ["--trials", "0"],
        ["--compare-fraction", "0"],
        ["--compare-fraction", "1.5"],
        ["--mode", "bogus"],
        ["--rounds", "many"],
    ],
)
def test_config_errors(argv, capsys):
    assert main(argv) == EXIT_CONFIG


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "missing" / "out.json"
    assert main(["--mode", "honest", "--rounds", "2", "--trials", "1", "--out", str(target)]) == EXIT_CONFIG


def test_bad_log_level(monkeypatch, capsys):
    monkeypatch.setenv("QSS_LOG", "loud")
    assert main(["--mode", "honest", "--rounds", "2", "--trials", "1"]) == EXIT_CONFIG


def test_invariant_breach_exit_code(monkeypatch, capsys):
    from qss_split import attack, cli

    def broken(*args, **kwargs):
        raise attack.AttackInvariantError("forced")

    monkeypatch.setattr(cli, "run_trials", broken)
    assert main(["--mode", "attack", "--rounds", "4", "--trials", "1"]) == EXIT_INVARIANT


def test_text_summary(capsys):
    code, out, _ = run(capsys, "--mode", "attack", "--rounds", "8", "--trials", "30", "--format", "text")
    assert code == EXIT_OK
    assert "detection rate" in out and "failure event rate" in out
