"""Tests for the JSON and CSV report formats."""

import csv
import io
import json

import pytest

from ptrinom.families import get_family, verify_instance
from ptrinom.field import build_field
from ptrinom.ptrinom_cli import reports
from ptrinom.search import SearchSpace, novelty_filter, search_space


def _sample_reports():
    return [
        verify_instance(get_family("th3"), 3, 0, "lemma1"),
        verify_instance(get_family("zieve_t1"), 4, 6, "lemma1"),
        verify_instance(get_family("dq"), 2, 0, "lemma1"),
    ]


def test_report_to_dict():
    """Tests the serialized fields of a passing report."""
    record = reports.report_to_dict(_sample_reports()[0])
    assert record["family"] == "th3"
    assert (record["p"], record["k"], record["l"], record["q"]) == (2, 3, 0, 8)
    assert record["is_permutation"] is True
    assert record["expected"] is True
    assert record["method"] == "lemma1"
    assert record["detail"] == "x^59+x^24+x^3"
    assert "witness" not in record


def test_report_to_dict_with_witness():
    """Tests a failing instance carries its witness as a list."""
    record = reports.report_to_dict(_sample_reports()[1])
    assert record["is_permutation"] is False
    assert len(record["witness"]) == 2


@pytest.mark.parametrize("format", ["json", "csv"])
def test_reports_round_trip(format):
    """Tests reports read back to the same records."""
    original = _sample_reports()
    buffer = io.StringIO()
    reports.write_reports(original, buffer, format)
    buffer.seek(0)
    parsed = reports.read_reports(buffer, format)
    assert [reports.report_to_dict(r) for r in parsed] == [
        reports.report_to_dict(r) for r in original
    ]


def test_json_report_layout():
    """Tests the top level object and the degenerate record."""
    buffer = io.StringIO()
    reports.write_reports(_sample_reports(), buffer)
    document = json.loads(buffer.getvalue())
    assert list(document) == ["reports"]
    degenerate = document["reports"][2]
    assert degenerate["degenerate"] is True
    assert degenerate["is_permutation"] is None


def test_csv_report_layout():
    """Tests the header and the encoding of booleans and witnesses."""
    buffer = io.StringIO()
    reports.write_reports(_sample_reports(), buffer, "csv")
    lines = buffer.getvalue().splitlines()
    assert lines[0] == ",".join(reports.REPORT_FIELDS)
    rows = list(csv.DictReader(io.StringIO(buffer.getvalue())))
    assert rows[0]["is_permutation"] == "true"
    assert rows[0]["witness"] == ""
    assert rows[1]["expected"] == "false"
    assert ";" in rows[1]["witness"]
    assert rows[2]["is_permutation"] == ""


def test_bad_formats():
    """Tests unknown formats and malformed booleans raise."""
    with pytest.raises(ValueError):
        reports.write_reports([], io.StringIO(), "xml")
    with pytest.raises(ValueError):
        reports.read_reports(io.StringIO(""), "xml")
    header = ",".join(reports.REPORT_FIELDS)
    text = header + "\nth3,2,3,0,8,yes,,lemma1,,1.0,,false,\n"
    with pytest.raises(ValueError):
        reports.read_reports(io.StringIO(text), "csv")


def test_table_is_stable():
    """Tests the table header, row order and repeatability."""
    text = reports.table_csv()
    assert text == reports.table_csv()
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == ",".join(reports.TABLE_FIELDS)
    assert len(rows) == 11
    assert [row["row"] for row in rows] == [str(i) for i in range(1, 12)]
    th3 = rows[8]
    assert th3["family"] == "th3"
    assert (th3["a"], th3["b"], th3["c"]) == ("lq+l+3", "(l+3)q+l", "(l-1)q+l+4")
    assert th3["signs"] == "+++"
    assert th3["condition"] == "k!≡2 mod 4 && gcd(2l+3,q-1)=1"
    assert th3["claim"] == "sufficient"


def test_write_hits():
    """Tests the search document and the optional oracle flag."""
    space = SearchSpace.default(2, 3)
    result = search_space(space)
    explained, unexplained = novelty_filter(result.hits, None, build_field(2, 3))

    buffer = io.StringIO()
    reports.write_hits(result, explained, unexplained, buffer)
    document = json.loads(buffer.getvalue())
    assert (document["p"], document["k"], document["q"]) == (2, 3, 8)
    assert document["candidates"] == space.size
    assert len(document["hits"]) == len(result.hits)
    assert len(document["explained"]) + len(document["unexplained"]) == len(
        result.hits
    )
    assert "oracle_agrees" not in document
    assert {"r": 3, "m": 3, "n": 8, "signs": [1, 1]} in document["hits"]

    buffer = io.StringIO()
    reports.write_hits(result, explained, unexplained, buffer, oracle_agrees=True)
    assert json.loads(buffer.getvalue())["oracle_agrees"] is True
