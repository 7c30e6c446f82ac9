"""Tests for the ptrinom subcommands and their exit codes."""

import json

import pytest

from ptrinom import families
from ptrinom.ptrinom_cli import main, reports
from ptrinom.ptrinom_cli.commands import (
    EXIT_FAILED,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    emit_table,
)
from ptrinom.ptrinom_cli.config import WORKERS_ENV, RunConfig


@pytest.fixture(autouse=True)
def no_worker_env(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)


def _run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_verify_negative_control(tmp_path):
    """Tests an iff family outside its condition passes as a non-permutation."""
    out = tmp_path / "zieve.json"
    code = main([
        "verify", "--family", "zieve_t1", "--k", "4", "--l", "6",
        "--negative", "--out", str(out),
    ])
    assert code == EXIT_OK
    (record,) = json.loads(out.read_text())["reports"]
    assert record["conditions_hold"] is False
    assert record["expected"] is False
    assert record["is_permutation"] is False
    assert len(record["witness"]) == 2


def test_verify_both_modes(capsys):
    """Tests the two engines agree on the q = 8 instance."""
    code, document = _run_json(
        capsys, ["verify", "--family", "th3", "--k", "3", "--l", "0", "--mode", "both"]
    )
    assert code == EXIT_OK
    (record,) = document["reports"]
    assert record["method"] == "both"
    assert record["is_permutation"] is True


def test_verify_csv(tmp_path):
    """Tests the CSV report reads back."""
    out = tmp_path / "th3.csv"
    code = main([
        "verify", "--family", "th3,tab1", "--k", "3", "--l", "0..2",
        "--format", "csv", "--negative", "--out", str(out),
    ])
    assert code == EXIT_OK
    with open(out) as stream:
        parsed = reports.read_reports(stream, "csv")
    assert {report.family for report in parsed} == {"th3", "tab1"}
    assert all(report.passed for report in parsed)


def test_verify_fraction_claim(capsys):
    """Tests the unconditional fraction claim permutes mu_{q+1} for k = 1..3."""
    code, document = _run_json(
        capsys, ["verify", "--family", "conj2b", "--k", "1..3"]
    )
    assert code == EXIT_OK
    assert [record["q"] for record in document["reports"]] == [3, 9, 27]
    for record in document["reports"]:
        assert record["family"] == "conj2b"
        assert record["is_permutation"] is True
        assert record["expected"] is True


def test_verify_failed_expectation(monkeypatch, capsys):
    """Tests a failed expectation exits with 1."""
    monkeypatch.setattr(families, "expectation", lambda kind, holds: False)
    code = main(["verify", "--family", "th3", "--k", "3", "--l", "0"])
    capsys.readouterr()
    assert code == EXIT_FAILED


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--family", "th3", "--k", "13", "--mode", "full"],
        ["verify", "--family", "th3", "--k", "13"],
        ["verify", "--family", "c3_3p1", "--k", "9"],
    ]
)
def test_verify_infeasible(argv):
    """Tests fields beyond the supported sizes exit with 3."""
    assert main(argv) == EXIT_INFEASIBLE


def test_verify_unknown_family():
    """Tests an unknown family id is a usage error."""
    assert main(["verify", "--family", "th9", "--k", "2"]) == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--family", "th3", "--k", "x"],
        ["verify", "--k", "2"],
        ["verify", "--family", "th3", "--k", "2", "--mode", "fast"],
        ["verify", "--family", "th3", "--k", "2", "--workers", "0"],
        ["frobnicate"],
    ]
)
def test_bad_arguments_exit_with_2(argv):
    """Tests argparse and config errors exit with 2."""
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_USAGE


def test_bad_worker_environment(monkeypatch):
    """Tests a malformed PTRINOM_WORKERS is a usage error."""
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(SystemExit) as info:
        main(["verify", "--family", "th3", "--k", "3"])
    assert info.value.code == EXIT_USAGE


def test_search_with_oracle(tmp_path):
    """Tests the search over F_64 agrees with the oracle."""
    out = tmp_path / "hits.json"
    assert main(["search", "--k", "3", "--oracle", "--out", str(out)]) == EXIT_OK
    document = json.loads(out.read_text())
    assert document["q"] == 8
    assert document["oracle_agrees"] is True
    assert {"r": 3, "m": 3, "n": 8, "signs": [1, 1]} in document["hits"]


def test_search_needs_single_k(capsys):
    """Tests search rejects a range of k."""
    assert main(["search", "--k", "2..3"]) == EXIT_USAGE


def test_classify_default(capsys):
    """Tests the fractional families at q = 16 fall into six classes."""
    code, document = _run_json(capsys, ["classify"])
    assert code == EXIT_OK
    assert document["q"] == 16
    assert len(document["classes"]) == 6
    assert document["degenerate"] == []
    pair = {"first": "tab1", "second": "zieve_t1", "d": 1}
    assert pair in document["fraction_coincidences"]
    merged = [cls for cls in document["classes"] if len(cls["members"]) == 2]
    (cls,) = merged
    assert {m["family"] for m in cls["members"]} == {"tab1", "th3"}


def test_classify_rejects_mixed_characteristics(capsys):
    """Tests families of both characteristics cannot be classified together."""
    assert main(["classify", "--family", "th3,cor1"]) == EXIT_USAGE


def test_table(tmp_path):
    """Tests the table command writes the comparison table."""
    out = tmp_path / "table.csv"
    assert main(["table", "--out", str(out)]) == EXIT_OK
    assert out.read_text() == reports.table_csv()


def test_emit_table(tmp_path):
    """Tests emit_table writes the same CSV on repeated calls."""
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert emit_table(RunConfig(command="table", out=str(first))) == EXIT_OK
    assert emit_table(RunConfig(command="table", out=str(second))) == EXIT_OK
    assert first.read_text() == second.read_text() == reports.table_csv()


def test_solve(capsys):
    """Tests the solver oracles over small fields."""
    code, document = _run_json(capsys, ["solve", "--n", "1..4"])
    assert code == EXIT_OK
    assert [item["n"] for item in document["fields"]] == [1, 2, 3, 4]
    assert all(not item["quadratic"] for item in document["fields"])


def test_solve_quadratic(capsys):
    """Tests x^2 + x = 0 over F_16 has roots 0 and 1."""
    code, document = _run_json(capsys, ["solve", "--n", "4", "--quadratic", "1,0"])
    assert code == EXIT_OK
    assert document == {"n": 4, "u": 1, "v": 0, "count": 2, "roots": [0, 1]}


def test_crosscheck(capsys):
    """Tests the engines agree on seeded samples."""
    code, document = _run_json(
        capsys, ["crosscheck", "--k", "1..2", "--samples", "40", "--seed", "3"]
    )
    assert code == EXIT_OK
    assert document["seed"] == 3
    assert [item["field"] for item in document["fields"]] == ["F_4", "F_16"]


def test_hou(capsys):
    """Tests the Hou sweep reports every pair count."""
    code, document = _run_json(capsys, ["hou", "--k", "1"])
    assert code == EXIT_OK
    (item,) = document["fields"]
    assert item["q"] == 3
    assert item["pairs"] == 81


def test_identities(capsys):
    """Tests the trace identities hold over F_9 and F_81."""
    code, document = _run_json(capsys, ["identities", "--k", "1..2"])
    assert code == EXIT_OK
    assert [item["failures"] for item in document["fields"]] == [
        {"2": 0, "5": 0, "8": 0}, {"2": 0, "5": 0, "8": 0}
    ]
