"""Query validation battery: syntax, semantics, execution.

Checkers run in that order and stop at the first failure. Semantic checks
are made against the grounded schema fragment the query was generated for,
not the full physical model, so a query that wanders outside its
sub-ontology is rejected even when the table exists upstream.
"""

from __future__ import annotations

import sqlite3
from dataclasses import dataclass

from .ontology import GroundedSchema
from .physical import NUMERIC_TYPES, TableDef
from .sql import (
    ColumnRef,
    Compare,
    FuncCall,
    Select,
    SqlSyntaxError,
    Star,
    is_single_select,
    parse_select,
    statement_keyword,
    walk,
)

SYNTAX = "Syntax"
SEMANTIC = "Semantic"
EXECUTION = "Execution"

# repair guidance keyed by the checker that failed
_GUIDELINES = {
    SYNTAX: "Generate syntactically valid SQL only.",
    SEMANTIC: "Only generate queries with the provided tables.",
    EXECUTION: "Ensure the query executes without errors on the target database.",
}

_TYPE_FAMILIES = {
    "INT": "numeric", "BIGINT": "numeric", "FLOAT": "numeric", "DECIMAL": "numeric",
    "VARCHAR": "text", "DATE": "temporal", "DATETIME": "temporal",
    "BOOLEAN": "boolean",
}


@dataclass(frozen=True)
class CheckerReport:
    status: str
    checker_type: str
    message: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "Valid"

    def render(self) -> str:
        lines = [f"Status: '{self.status}'", f"Checker Type: '{self.checker_type}'"]
        if self.message is not None:
            lines.append(f"Error message: '{self.message}'")
        return "\n".join(lines)


def _valid(checker_type: str) -> CheckerReport:
    return CheckerReport("Valid", checker_type)


def _invalid(checker_type: str, message: str) -> CheckerReport:
    return CheckerReport("Invalid", checker_type, message)


def check_read_only(sql: str) -> CheckerReport | None:
    """The guard: anything whose leading keyword is not SELECT is refused
    before any other checker or the engine sees it."""
    if statement_keyword(sql) != "SELECT":
        return _invalid(EXECUTION, "statement is not read-only")
    return None


def check_syntax(sql: str) -> CheckerReport:
    try:
        parse_select(sql)
    except SqlSyntaxError as exc:
        return _invalid(SYNTAX, str(exc))
    return _valid(SYNTAX)


def _referenced_tables(
    select: Select, grounded: GroundedSchema
) -> tuple[list[tuple[str, TableDef]], list[str]]:
    """Resolve FROM and JOIN references to grounded tables.

    Returns (bindings, errors) where bindings maps each usable name
    (alias if given, else table name, lowercased) to its table.
    """
    refs = [select.from_table] + [j.table for j in select.joins]
    bindings: list[tuple[str, TableDef]] = []
    errors: list[str] = []
    for ref in refs:
        table = grounded.table(ref.name)
        if table is None:
            errors.append(f"Table {ref.name} does not exist")
            continue
        key = (ref.alias or ref.name).lower()
        bindings.append((key, table))
    return bindings, errors


def _resolve_column(
    col: ColumnRef,
    bindings: list[tuple[str, TableDef]],
    grounded: GroundedSchema,
) -> tuple[TableDef | None, str | None]:
    """Find the table a column reference belongs to, or an error message."""
    if col.table:
        want = col.table.lower()
        for key, table in bindings:
            if key == want or table.name.lower() == want:
                if table.column(col.column) is None:
                    return None, f"Column {col.column} does not exist in table {table.name}"
                return table, None
        # qualifier names a known table outside the FROM clause: let the
        # execution checker surface it, but unknown tables fail here
        table = grounded.table(col.table)
        if table is None:
            return None, f"Table {col.table} does not exist"
        if table.column(col.column) is None:
            return None, f"Column {col.column} does not exist in table {table.name}"
        return table, None
    hits = [t for _, t in bindings if t.column(col.column) is not None]
    if not hits:
        return None, f"Column {col.column} does not exist"
    # ambiguous unqualified names pass here; the engine rejects them later
    return hits[0], None


def _column_type(
    col: ColumnRef, bindings: list[tuple[str, TableDef]], grounded: GroundedSchema
) -> str | None:
    table, err = _resolve_column(col, bindings, grounded)
    if table is None or err is not None:
        return None
    column = table.column(col.column)
    return column.sql_type if column else None


def check_semantics(sql: str | Select, grounded: GroundedSchema) -> CheckerReport:
    """Validate table and column references, join keys, aggregate arguments."""
    select = parse_select(sql) if isinstance(sql, str) else sql
    bindings, table_errors = _referenced_tables(select, grounded)
    if table_errors:
        return _invalid(SEMANTIC, table_errors[0])

    aliases = {item.alias.lower() for item in select.items if item.alias}
    for node in walk(select):
        if not isinstance(node, ColumnRef):
            continue
        if not node.table and node.column.lower() in aliases:
            continue
        _, err = _resolve_column(node, bindings, grounded)
        if err is not None:
            return _invalid(SEMANTIC, err)

    fk_pairs = grounded.fk_pairs()
    for join in select.joins:
        for node in walk(join.on):
            if not (
                isinstance(node, Compare)
                and node.op == "="
                and isinstance(node.left, ColumnRef)
                and isinstance(node.right, ColumnRef)
            ):
                continue
            left, right = node.left, node.right
            lt, _ = _resolve_column(left, bindings, grounded)
            rt, _ = _resolve_column(right, bindings, grounded)
            if lt is None or rt is None:
                continue
            pair = (
                lt.name.lower(), left.column.lower(),
                rt.name.lower(), right.column.lower(),
            )
            if pair in fk_pairs:
                continue
            ltype = lt.column(left.column).sql_type
            rtype = rt.column(right.column).sql_type
            if _TYPE_FAMILIES[ltype] != _TYPE_FAMILIES[rtype]:
                return _invalid(
                    SEMANTIC,
                    f"Join between {lt.name}.{left.column} and {rt.name}.{right.column}"
                    " is neither a foreign key nor type-compatible",
                )

    for node in walk(select):
        if not (isinstance(node, FuncCall) and node.name in ("SUM", "AVG")):
            continue
        if isinstance(node.arg, Star):
            return _invalid(SEMANTIC, f"Aggregate {node.name} cannot be applied to *")
        for sub in walk(node.arg):
            if not isinstance(sub, ColumnRef):
                continue
            ctype = _column_type(sub, bindings, grounded)
            if ctype is not None and ctype not in NUMERIC_TYPES:
                owner, _ = _resolve_column(sub, bindings, grounded)
                label = f"{owner.name}.{sub.column}" if owner else sub.column
                return _invalid(
                    SEMANTIC,
                    f"Aggregate {node.name} requires a numeric argument,"
                    f" {label} is {ctype}",
                )

    return _valid(SEMANTIC)


def check_execution(sql: str, connection: sqlite3.Connection) -> CheckerReport:
    """Probe the query against the engine; refuses anything but one SELECT."""
    if not is_single_select(sql):
        return _invalid(EXECUTION, "statement is not read-only")
    probe = f"SELECT * FROM ({sql.rstrip().rstrip(';')}) LIMIT 1"
    try:
        connection.execute(probe).fetchall()
    except sqlite3.Error as exc:
        return _invalid(EXECUTION, str(exc))
    return _valid(EXECUTION)


def run_battery(
    sql: str,
    grounded: GroundedSchema,
    connection: sqlite3.Connection | None = None,
) -> list[CheckerReport]:
    """Run all checkers in order, stopping at the first failure."""
    guard = check_read_only(sql)
    if guard is not None:
        return [guard]
    reports = [check_syntax(sql)]
    if not reports[-1].ok:
        return reports
    reports.append(check_semantics(sql, grounded))
    if not reports[-1].ok:
        return reports
    if connection is not None:
        reports.append(check_execution(sql, connection))
    return reports


def repair_instruction(reports: list[CheckerReport]) -> str:
    """Build the feedback block appended to the next generation prompt."""
    failed = [r for r in reports if not r.ok]
    if not failed:
        return ""
    lines = ["Generated query may be invalid because:"]
    lines.extend(f"- {r.message}." for r in failed)
    lines.append(_GUIDELINES[failed[0].checker_type])
    return "\n".join(lines)
