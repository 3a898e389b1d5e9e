"""Read-only query execution with pagination.

Queries without their own LIMIT get one appended; queries that already
paginate are wrapped in a subselect so the caller's window applies on top.
total_rows always reflects the unpaginated count.
"""

from __future__ import annotations

import sqlite3
from dataclasses import dataclass

from .errors import EngineError, GuardError
from .sql import is_single_select, parse_select


@dataclass(frozen=True)
class ResultSet:
    columns: tuple[str, ...]
    column_types: tuple[str, ...]
    rows: tuple[tuple, ...]
    total_rows: int
    limit: int
    offset: int


def infer_column_types(rows: list[tuple], width: int) -> tuple[str, ...]:
    """Guess SQL types from values; the engine does not keep declared types."""
    types = []
    for i in range(width):
        values = [row[i] for row in rows if row[i] is not None]
        if not values:
            types.append("VARCHAR")
        elif all(isinstance(v, bool) for v in values):
            types.append("BOOLEAN")
        elif all(isinstance(v, int) and not isinstance(v, bool) for v in values):
            types.append("INT")
        elif all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            types.append("FLOAT")
        else:
            types.append("VARCHAR")
    return tuple(types)


def execute_query(
    connection: sqlite3.Connection, sql: str, limit: int = 100, offset: int = 0
) -> ResultSet:
    if limit < 0 or offset < 0:
        raise EngineError("limit and offset must be non-negative")
    if not is_single_select(sql):
        raise GuardError("statement is not read-only")
    select = parse_select(sql)
    body = sql.rstrip().rstrip(";")
    if select.limit is None:
        paged = f"{body} LIMIT {limit} OFFSET {offset}"
    else:
        # the query pages itself; window the caller's view over its output
        paged = f"SELECT * FROM ({body}) LIMIT {limit} OFFSET {offset}"
    try:
        cursor = connection.execute(paged)
        rows = [tuple(r) for r in cursor.fetchall()]
        columns = tuple(d[0] for d in cursor.description or ())
        total = connection.execute(f"SELECT COUNT(*) FROM ({body})").fetchone()[0]
    except sqlite3.Error as exc:
        raise EngineError(f"query failed: {exc}") from exc
    return ResultSet(
        columns=columns,
        column_types=infer_column_types(rows, len(columns)),
        rows=tuple(rows),
        total_rows=int(total),
        limit=limit,
        offset=offset,
    )
