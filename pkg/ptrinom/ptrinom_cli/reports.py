"""JSON and CSV reports written by the command line, with parsers."""

import csv
import io
import json
from typing import Any, Dict, List, Optional, Sequence, TextIO

from ptrinom.families import (
    FamilySpec,
    TABLE_ROWS,
    VerificationReport,
    get_family,
)
from ptrinom.perm import Method, PermVerdict
from ptrinom.search import Explanation, SearchResult

REPORT_FIELDS = (
    "family", "p", "k", "l", "q", "conditions_hold", "is_permutation",
    "method", "witness", "elapsed_ms", "expected", "degenerate", "detail",
)

TABLE_FIELDS = (
    "row", "family", "a", "b", "c", "signs", "condition", "claim", "source",
)


def report_to_dict(report: VerificationReport) -> Dict[str, Any]:
    """Serializes a report; witness is omitted when there is none."""
    record = {
        "family": report.family,
        "p": report.p,
        "k": report.k,
        "l": report.l,
        "q": report.q,
        "conditions_hold": report.conditions_hold,
        "is_permutation": report.is_permutation,
        "method": report.method,
        "elapsed_ms": round(report.elapsed_ms, 3),
        "expected": report.expected,
        "degenerate": report.degenerate,
        "detail": report.detail,
    }
    if report.witness is not None:
        record["witness"] = list(report.witness)
    return record


def report_from_dict(record: Dict[str, Any]) -> VerificationReport:
    verdict = None
    if record.get("is_permutation") is not None:
        method = (
            Method.FULL_FIELD if record["method"] == Method.FULL_FIELD.value
            else Method.LEMMA1
        )
        witness = record.get("witness")
        verdict = PermVerdict(
            bool(record["is_permutation"]), method,
            None if witness is None else tuple(int(x) for x in witness),
        )
    return VerificationReport(
        family=record["family"],
        p=int(record["p"]),
        k=int(record["k"]),
        l=int(record["l"]),
        q=int(record["q"]),
        conditions_hold=bool(record["conditions_hold"]),
        verdict=verdict,
        method=record["method"],
        elapsed_ms=float(record["elapsed_ms"]),
        expected=record.get("expected"),
        degenerate=bool(record.get("degenerate", False)),
        detail=record.get("detail"),
    )


def _csv_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ";".join(str(x) for x in value)
    return str(value)


def _optional_bool(text: str) -> Optional[bool]:
    if text == "":
        return None
    if text not in ("true", "false"):
        raise ValueError(f"Expected true, false or empty but got {text!r}.")
    return text == "true"


def write_reports(
    reports: Sequence[VerificationReport], stream: TextIO, format: str = "json"
) -> None:
    records = [report_to_dict(report) for report in reports]
    if format == "json":
        json.dump({"reports": records}, stream, indent=2)
        stream.write("\n")
    elif format == "csv":
        writer = csv.DictWriter(stream, fieldnames=REPORT_FIELDS, lineterminator="\n")
        writer.writeheader()
        for record in records:
            writer.writerow({
                name: _csv_value(record.get(name)) for name in REPORT_FIELDS
            })
    else:
        raise ValueError(f"Format must be json or csv but is {format}.")


def read_reports(stream: TextIO, format: str = "json") -> List[VerificationReport]:
    """Parses reports written by write_reports."""
    if format == "json":
        return [report_from_dict(record) for record in json.load(stream)["reports"]]
    if format != "csv":
        raise ValueError(f"Format must be json or csv but is {format}.")

    reports = []
    for row in csv.DictReader(stream):
        record: Dict[str, Any] = dict(row)
        record["conditions_hold"] = _optional_bool(row["conditions_hold"])
        record["is_permutation"] = _optional_bool(row["is_permutation"])
        record["expected"] = _optional_bool(row["expected"])
        record["degenerate"] = _optional_bool(row["degenerate"])
        record["detail"] = row["detail"] or None
        if row["witness"]:
            record["witness"] = [int(x) for x in row["witness"].split(";")]
        else:
            record.pop("witness")
        reports.append(report_from_dict(record))
    return reports


def table_rows(ids: Sequence = TABLE_ROWS) -> List[Dict[str, str]]:
    rows = []
    for position, family_id in enumerate(ids, start=1):
        spec: FamilySpec = get_family(family_id)
        a, b, c = spec.exponents
        rows.append({
            "row": str(position),
            "family": spec.id.value,
            "a": a,
            "b": b,
            "c": c,
            "signs": "".join("+" if s > 0 else "-" for s in spec.signs),
            "condition": str(spec.condition),
            "claim": spec.claim_kind.value,
            "source": spec.source,
        })
    return rows


def write_table(stream: TextIO, ids: Sequence = TABLE_ROWS) -> None:
    """Writes the comparison table as CSV with a fixed header."""
    writer = csv.DictWriter(stream, fieldnames=TABLE_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(table_rows(ids))


def table_csv(ids: Sequence = TABLE_ROWS) -> str:
    buffer = io.StringIO()
    write_table(buffer, ids)
    return buffer.getvalue()


def _explanation_to_dict(item: Explanation) -> Dict[str, Any]:
    record = {
        "r": item.hit.r,
        "m": item.hit.m,
        "n": item.hit.n,
        "signs": list(item.hit.signs),
    }
    if item.family is not None:
        record.update(family=item.family, l=item.l, d=item.d)
    if item.frac is not None:
        record["frac"] = item.frac
    return record


def write_hits(
    result: SearchResult,
    explained: Sequence[Explanation],
    unexplained: Sequence[Explanation],
    stream: TextIO,
    oracle_agrees: Optional[bool] = None
) -> None:
    """Writes a search result and its novelty partition as JSON."""
    space = result.space
    document = {
        "p": space.p,
        "k": space.k,
        "q": space.q,
        "signs": space.signs,
        "candidates": space.size,
        "vanishing": result.vanishing,
        "degenerate": result.degenerate,
        "hits": [
            {"r": hit.r, "m": hit.m, "n": hit.n, "signs": list(hit.signs)}
            for hit in result.hits
        ],
        "explained": [_explanation_to_dict(item) for item in explained],
        "unexplained": [_explanation_to_dict(item) for item in unexplained],
    }
    if oracle_agrees is not None:
        document["oracle_agrees"] = oracle_agrees
    json.dump(document, stream, indent=2)
    stream.write("\n")
