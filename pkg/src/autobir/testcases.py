"""Archived test cases and replay.

Every accepted interaction can be captured as a JSON document holding the
question, the accepted query, its explanation, a bounded result snapshot,
the chart spec, the sub-ontology and bindings it was grounded in, and the
full checker trail. Replay re-executes the archived query and compares
against the snapshot.
"""

from __future__ import annotations

import json
import sqlite3
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NotFoundError
from .executor import ResultSet, execute_query

SNAPSHOT_ROWS = 50
NUMERIC_TOLERANCE = 1e-9


@dataclass
class TestCaseRecord:
    id: str
    created_at: float
    source: str
    question: str
    query: str
    explanation: str
    result_snapshot: dict
    chart_spec: dict | None
    sub_ontology: str
    bindings: str
    checker_trail: list = field(default_factory=list)

    def to_dict(self) -> dict:
        # key order is part of the format; do not reorder
        return {
            "id": self.id,
            "created_at": self.created_at,
            "source": self.source,
            "question": self.question,
            "query": self.query,
            "explanation": self.explanation,
            "result_snapshot": self.result_snapshot,
            "chart_spec": self.chart_spec,
            "sub_ontology": self.sub_ontology,
            "bindings": self.bindings,
            "checker_trail": self.checker_trail,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def record_from_dict(raw: dict) -> TestCaseRecord:
    return TestCaseRecord(
        id=raw["id"],
        created_at=raw["created_at"],
        source=raw["source"],
        question=raw["question"],
        query=raw["query"],
        explanation=raw.get("explanation", ""),
        result_snapshot=raw["result_snapshot"],
        chart_spec=raw.get("chart_spec"),
        sub_ontology=raw.get("sub_ontology", ""),
        bindings=raw.get("bindings", ""),
        checker_trail=raw.get("checker_trail", []),
    )


def snapshot_result(result: ResultSet) -> dict:
    return {
        "columns": list(result.columns),
        "column_types": list(result.column_types),
        "rows": [list(row) for row in result.rows[:SNAPSHOT_ROWS]],
        "total_rows": result.total_rows,
    }


def trail_from_attempts(attempts) -> list:
    return [
        {
            "query": attempt.query,
            "reports": [
                {
                    "status": r.status,
                    "checker_type": r.checker_type,
                    "message": r.message,
                }
                for r in attempt.reports
            ],
        }
        for attempt in attempts
    ]


def build_testcase(
    source: str,
    question: str,
    query: str,
    explanation: str,
    result: ResultSet,
    sub_ontology_text: str,
    bindings_text: str,
    attempts,
    chart_spec: dict | None = None,
) -> TestCaseRecord:
    return TestCaseRecord(
        id=f"tc-{uuid.uuid4().hex[:12]}",
        created_at=time.time(),
        source=source,
        question=question,
        query=query,
        explanation=explanation,
        result_snapshot=snapshot_result(result),
        chart_spec=chart_spec,
        sub_ontology=sub_ontology_text,
        bindings=bindings_text,
        checker_trail=trail_from_attempts(attempts),
    )


def _testcase_dir(catalog_root: Path | str) -> Path:
    return Path(catalog_root) / "testcases"


def archive_testcase(catalog_root: Path | str, record: TestCaseRecord) -> Path:
    directory = _testcase_dir(catalog_root)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / record.id
    path.write_text(record.to_json(), encoding="utf-8")
    return path


def load_testcase(catalog_root: Path | str, testcase_id: str) -> TestCaseRecord:
    path = _testcase_dir(catalog_root) / testcase_id
    if not path.exists():
        raise NotFoundError(f"unknown test case {testcase_id}", testcase_id=testcase_id)
    return record_from_dict(json.loads(path.read_text(encoding="utf-8")))


def list_testcases(catalog_root: Path | str, source: str | None = None) -> list[TestCaseRecord]:
    directory = _testcase_dir(catalog_root)
    if not directory.exists():
        return []
    records = []
    for path in sorted(directory.iterdir()):
        if path.name.startswith("."):
            continue
        record = record_from_dict(json.loads(path.read_text(encoding="utf-8")))
        if source is None or record.source == source:
            records.append(record)
    return records


@dataclass
class ReplayResult:
    testcase_id: str
    passed: bool
    diffs: list[str] = field(default_factory=list)


def _values_match(expected, actual) -> bool:
    if isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        if isinstance(expected, bool) or isinstance(actual, bool):
            return expected == actual
        return abs(float(expected) - float(actual)) <= NUMERIC_TOLERANCE
    return expected == actual


def replay_testcase(
    record: TestCaseRecord, connection: sqlite3.Connection
) -> ReplayResult:
    """Re-run the archived query and diff the result against the snapshot."""
    snapshot = record.result_snapshot
    try:
        result = execute_query(connection, record.query, limit=SNAPSHOT_ROWS, offset=0)
    except Exception as exc:
        # replay must report, not raise: an archived query that no longer
        # parses or runs is itself the regression being detected
        return ReplayResult(record.id, False, [f"query failed: {exc}"])

    diffs = []
    if list(result.columns) != snapshot["columns"]:
        diffs.append(
            f"column names differ: {list(result.columns)} != {snapshot['columns']}"
        )
    if result.total_rows != snapshot["total_rows"]:
        diffs.append(f"total_rows differ: {result.total_rows} != {snapshot['total_rows']}")
    expected_rows = snapshot["rows"]
    actual_rows = [list(row) for row in result.rows[: len(expected_rows)]]
    if len(actual_rows) != len(expected_rows):
        diffs.append(f"row count differs: {len(actual_rows)} != {len(expected_rows)}")
    else:
        for r, (want, got) in enumerate(zip(expected_rows, actual_rows)):
            if len(want) != len(got):
                diffs.append(f"row {r} width differs: {len(got)} != {len(want)}")
                continue
            for c, (w, g) in enumerate(zip(want, got)):
                if not _values_match(w, g):
                    diffs.append(f"row {r} column {c}: {g!r} != {w!r}")
    return ReplayResult(record.id, not diffs, diffs)
