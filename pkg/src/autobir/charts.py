"""Chart specification generation and validation.

A chart spec is a small JSON object naming columns of an existing result
set. Validation is structural only; rendering happens client-side.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ChartGenerationExhausted, Diagnostic
from .executor import ResultSet
from .provider import LLMProvider

CHART_KINDS = ("bar", "line", "scatter", "pie", "table")

_AGG_RE = re.compile(r"^(SUM|AVG|COUNT|MIN|MAX)\((\w+)\)$", re.IGNORECASE)

_SAMPLE_ROWS = 10
_SAMPLE_COLS = 10


@dataclass(frozen=True)
class ChartSpec:
    kind: str
    x: str
    y: str
    series: str | None = None
    title: str = ""

    def to_dict(self) -> dict:
        # field order is part of the wire format
        return {
            "kind": self.kind,
            "x": self.x,
            "y": self.y,
            "series": self.series,
            "title": self.title,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def chart_from_dict(raw: dict) -> ChartSpec:
    if not isinstance(raw, dict):
        raise ValueError("chart spec must be a JSON object")
    missing = [key for key in ("kind", "x", "y") if key not in raw]
    if missing:
        raise ValueError(f"chart spec missing fields: {', '.join(missing)}")
    return ChartSpec(
        kind=str(raw["kind"]),
        x=str(raw["x"]),
        y=str(raw["y"]),
        series=None if raw.get("series") in (None, "") else str(raw["series"]),
        title=str(raw.get("title", "")),
    )


def _column_ok(name: str, columns: tuple[str, ...]) -> bool:
    lowered = {c.lower() for c in columns}
    return name.lower() in lowered


def validate_chart(spec: ChartSpec, result: ResultSet) -> list[Diagnostic]:
    diags = []
    if spec.kind not in CHART_KINDS:
        diags.append(
            Diagnostic(
                "chart.kind",
                f"unknown chart kind {spec.kind!r}, expected one of {', '.join(CHART_KINDS)}",
                subject=spec.kind,
            )
        )
    if not _column_ok(spec.x, result.columns):
        diags.append(
            Diagnostic("chart.x", f"x column {spec.x!r} is not in the result", subject=spec.x)
        )
    agg = _AGG_RE.match(spec.y)
    y_column = agg.group(2) if agg else spec.y
    if not _column_ok(y_column, result.columns):
        diags.append(
            Diagnostic("chart.y", f"y column {spec.y!r} is not in the result", subject=spec.y)
        )
    if spec.series is not None and not _column_ok(spec.series, result.columns):
        diags.append(
            Diagnostic(
                "chart.series",
                f"series column {spec.series!r} is not in the result",
                subject=spec.series,
            )
        )
    return diags


def _render_sample(result: ResultSet) -> str:
    columns = result.columns[:_SAMPLE_COLS]
    lines = [" | ".join(columns)]
    for row in result.rows[:_SAMPLE_ROWS]:
        lines.append(" | ".join("" if v is None else str(v) for v in row[:_SAMPLE_COLS]))
    return "\n".join(lines)


CHART_TASK_LINE = (
    "Task: Given a question and a sample of a query result, propose a chart"
    " specification as a JSON object with the fields kind, x, y, series, title."
)

_CHART_GUIDELINES = (
    "kind must be one of bar, line, scatter, pie, table.",
    "x, y and series must name result columns; y may be an aggregate such as SUM(col).",
    "Answer with the JSON object only.",
)

_JSON_FENCE_RE = re.compile(r"```(?:json)?\s*\n(.*?)```", re.DOTALL | re.IGNORECASE)


def chart_prompt(question: str, result: ResultSet, repair_notes: str | None = None) -> str:
    sections = [
        "\n".join([CHART_TASK_LINE] + [f"- Guideline: {g}" for g in _CHART_GUIDELINES]),
        f"Question: {question}",
        f"Result sample:\n{_render_sample(result)}",
    ]
    if repair_notes:
        sections.append(repair_notes)
    return "\n\n".join(sections)


def generate_chart(
    question: str,
    result: ResultSet,
    provider: LLMProvider,
    max_iterations: int = 3,
) -> ChartSpec:
    """Ask the provider for a spec, re-prompting with violations until valid."""
    repair_notes = None
    failures: list[str] = []
    for _ in range(max_iterations):
        response = provider.complete(chart_prompt(question, result, repair_notes))
        match = _JSON_FENCE_RE.search(response)
        text = match.group(1) if match else response
        try:
            spec = chart_from_dict(json.loads(text))
        except ValueError as exc:
            failures.append(str(exc))
            repair_notes = (
                "The previous specification was rejected because:\n"
                f"- {exc}.\nAnswer with one JSON object only."
            )
            continue
        diags = validate_chart(spec, result)
        if not diags:
            return spec
        failures.extend(d.message for d in diags)
        bullets = "\n".join(f"- {d.message}." for d in diags)
        repair_notes = (
            f"The previous specification was rejected because:\n{bullets}\n"
            "Only reference columns present in the result."
        )
    raise ChartGenerationExhausted(
        f"no valid chart specification after {max_iterations} attempts",
        failures=failures,
    )
