"""Physical database model: DDL parsing, live-schema introspection, validation.

The supported DDL grammar is CREATE TABLE with column definitions, one
optional table-level PRIMARY KEY, and FOREIGN KEY ... REFERENCES clauses.
Column types come from a closed set; engine types outside it are mapped to
VARCHAR with a warning so nothing is silently dropped.

Identifier display preserves the declared case, while comparisons are
case-insensitive throughout.
"""

from __future__ import annotations

import logging
import sqlite3
import warnings
from dataclasses import dataclass

from .errors import (
    Diagnostic,
    DdlSyntaxError,
    EngineConnectionError,
    SchemaReferenceError,
    UnsupportedTypeWarning,
)
from .sql import SqlSyntaxError, Token, tokenize

logger = logging.getLogger(__name__)

SQL_TYPES = ("INT", "BIGINT", "FLOAT", "DECIMAL", "VARCHAR", "DATE", "DATETIME", "BOOLEAN")

# common engine spellings folded into the closed set before the VARCHAR fallback
_TYPE_ALIASES = {
    "INTEGER": "INT",
    "SMALLINT": "INT",
    "TINYINT": "INT",
    "REAL": "FLOAT",
    "DOUBLE": "FLOAT",
    "NUMERIC": "DECIMAL",
    "TEXT": "VARCHAR",
    "CHAR": "VARCHAR",
    "NVARCHAR": "VARCHAR",
    "TIMESTAMP": "DATETIME",
    "BOOL": "BOOLEAN",
}

NUMERIC_TYPES = frozenset({"INT", "BIGINT", "FLOAT", "DECIMAL"})


@dataclass(frozen=True)
class ColumnDef:
    name: str
    sql_type: str
    nullable: bool = True


@dataclass(frozen=True)
class ForeignKey:
    columns: tuple[str, ...]
    target_table: str
    target_columns: tuple[str, ...]


@dataclass(frozen=True)
class TableDef:
    name: str
    columns: tuple[ColumnDef, ...]
    primary_key: tuple[str, ...] = ()
    foreign_keys: tuple[ForeignKey, ...] = ()

    def column(self, name: str) -> ColumnDef | None:
        lowered = name.lower()
        for col in self.columns:
            if col.name.lower() == lowered:
                return col
        return None


@dataclass(frozen=True)
class PhysicalModel:
    tables: tuple[TableDef, ...] = ()
    source: str = ""

    def table(self, name: str) -> TableDef | None:
        lowered = name.lower()
        for tab in self.tables:
            if tab.name.lower() == lowered:
                return tab
        return None


# --- DDL parsing --------------------------------------------------------------


class _DdlParser:
    """Recursive-descent parser over the shared SQL tokenizer."""

    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[min(self.pos, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, tok: Token, hint: str) -> DdlSyntaxError:
        shown = tok.value if tok.kind != "EOF" else "end of input"
        return DdlSyntaxError(f"unexpected token '{shown}', {hint}", tok.line, tok.column)

    def expect_word(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.upper == word:
            return self.advance()
        raise self.fail(tok, f"expected {word}")

    def expect_punct(self, value: str) -> Token:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value == value:
            return self.advance()
        raise self.fail(tok, f"expected '{value}'")

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.fail(tok, "expected an identifier")
        return self.advance()

    def ident_list(self) -> tuple[str, ...]:
        self.expect_punct("(")
        names = [self.expect_ident().value]
        while self.peek().value == ",":
            self.advance()
            names.append(self.expect_ident().value)
        self.expect_punct(")")
        return tuple(names)

    def parse(self) -> list[TableDef]:
        tables: list[TableDef] = []
        while self.peek().kind != "EOF":
            tables.append(self.parse_create())
        return tables

    def parse_create(self) -> TableDef:
        self.expect_word("CREATE")
        self.expect_word("TABLE")
        name_tok = self.expect_ident()
        self.expect_punct("(")
        columns: list[ColumnDef] = []
        primary_key: tuple[str, ...] = ()
        fks: list[ForeignKey] = []
        while True:
            tok = self.peek()
            if tok.kind != "IDENT":
                raise self.fail(tok, "expected a column definition or constraint")
            if tok.upper == "PRIMARY":
                if primary_key:
                    raise self.fail(tok, "duplicate PRIMARY KEY clause")
                self.advance()
                self.expect_word("KEY")
                primary_key = self.ident_list()
            elif tok.upper == "FOREIGN":
                self.advance()
                self.expect_word("KEY")
                local = self.ident_list()
                self.expect_word("REFERENCES")
                target = self.expect_ident().value
                target_cols = self.ident_list()
                fks.append(ForeignKey(local, target, target_cols))
            else:
                columns.append(self.parse_column())
            if self.peek().value == ",":
                self.advance()
                continue
            self.expect_punct(")")
            break
        self.expect_punct(";")
        return TableDef(name_tok.value, tuple(columns), primary_key, tuple(fks))

    def parse_column(self) -> ColumnDef:
        name = self.expect_ident().value
        type_tok = self.expect_ident()
        sql_type = type_tok.upper
        if sql_type not in SQL_TYPES:
            raise DdlSyntaxError(
                f"unsupported column type '{type_tok.value}'", type_tok.line, type_tok.column
            )
        nullable = True
        if self.peek().kind == "IDENT" and self.peek().upper == "NOT":
            self.advance()
            self.expect_word("NULL")
            nullable = False
        return ColumnDef(name, sql_type, nullable)


def parse_ddl(text: str) -> PhysicalModel:
    """Parse DDL text into a PhysicalModel.

    Raises DdlSyntaxError for anything outside the supported grammar and
    SchemaReferenceError when a foreign key points at an unknown table or
    column, so a successfully parsed model is referentially sound.
    """
    try:
        tokens = tokenize(text)
    except SqlSyntaxError as exc:
        raise DdlSyntaxError(exc.message, exc.line, exc.column) from exc
    tables = _DdlParser(tokens).parse()
    model = PhysicalModel(tuple(tables), source="ddl")
    _check_references(model)
    return model


def _check_references(model: PhysicalModel) -> None:
    seen: set[str] = set()
    for table in model.tables:
        key = table.name.lower()
        if key in seen:
            raise SchemaReferenceError(f"duplicate table name {table.name}", table=table.name)
        seen.add(key)
    for table in model.tables:
        for fk in table.foreign_keys:
            target = model.table(fk.target_table)
            if target is None:
                raise SchemaReferenceError(
                    f"Table {fk.target_table} does not exist",
                    table=table.name,
                )
            for col in fk.columns:
                if table.column(col) is None:
                    raise SchemaReferenceError(
                        f"Column {col} does not exist in table {table.name}",
                        table=table.name,
                    )
            for col in fk.target_columns:
                if target.column(col) is None:
                    raise SchemaReferenceError(
                        f"Column {col} does not exist in table {target.name}",
                        table=target.name,
                    )


def serialize_ddl(model: PhysicalModel) -> str:
    """Render a model back to DDL text; parse_ddl of the output is a fixed point."""
    statements = []
    for table in model.tables:
        lines = []
        for col in table.columns:
            suffix = "" if col.nullable else " NOT NULL"
            lines.append(f"  {col.name} {col.sql_type}{suffix}")
        if table.primary_key:
            lines.append(f"  PRIMARY KEY ({', '.join(table.primary_key)})")
        for fk in table.foreign_keys:
            lines.append(
                f"  FOREIGN KEY ({', '.join(fk.columns)}) "
                f"REFERENCES {fk.target_table}({', '.join(fk.target_columns)})"
            )
        body = ",\n".join(lines)
        statements.append(f"CREATE TABLE {table.name} (\n{body}\n);")
    return "\n\n".join(statements) + ("\n" if statements else "")


# --- live-schema introspection --------------------------------------------------


def open_connection(
    descriptor: str, read_only: bool = False, cross_thread: bool = False
) -> sqlite3.Connection:
    """Open the embedded engine behind a ``file:<path>`` descriptor.

    cross_thread relaxes the engine's same-thread check; callers doing that
    must serialize access themselves.
    """
    if not descriptor.startswith("file:"):
        raise EngineConnectionError(
            f"unsupported connection descriptor {descriptor!r}", descriptor=descriptor
        )
    uri = descriptor
    if read_only:
        uri += ("&" if "?" in uri else "?") + "mode=ro"
    try:
        conn = sqlite3.connect(uri, uri=True, check_same_thread=not cross_thread)
        conn.execute("SELECT 1")
    except sqlite3.Error as exc:
        raise EngineConnectionError(
            f"cannot open {descriptor}: {exc}", descriptor=descriptor
        ) from exc
    return conn


def _map_engine_type(declared: str, table: str, column: str) -> str:
    upper = declared.strip().upper()
    base = upper.split("(", 1)[0].strip()
    if base in SQL_TYPES:
        return base
    if base in _TYPE_ALIASES:
        return _TYPE_ALIASES[base]
    warnings.warn(
        f"column {table}.{column} has unsupported type '{declared}', mapped to VARCHAR",
        UnsupportedTypeWarning,
        stacklevel=3,
    )
    return "VARCHAR"


def introspect(descriptor: str) -> PhysicalModel:
    """Build a PhysicalModel from a live database.

    Declaration order of tables and columns is preserved as reported by the
    engine, so a database created from parse_ddl output introspects back to
    a structurally equal model.
    """
    conn = open_connection(descriptor, read_only=True)
    try:
        rows = conn.execute(
            "SELECT name FROM sqlite_master WHERE type = 'table' "
            "AND name NOT LIKE 'sqlite_%' ORDER BY rowid"
        ).fetchall()
        tables: list[TableDef] = []
        for (table_name,) in rows:
            info = conn.execute(f'PRAGMA table_info("{table_name}")').fetchall()
            columns = []
            pk_cols: list[tuple[int, str]] = []
            for _cid, col_name, col_type, notnull, _default, pk in info:
                sql_type = _map_engine_type(col_type or "", table_name, col_name)
                columns.append(ColumnDef(col_name, sql_type, nullable=not notnull))
                if pk:
                    pk_cols.append((pk, col_name))
            pk_cols.sort()
            fk_rows = conn.execute(f'PRAGMA foreign_key_list("{table_name}")').fetchall()
            grouped: dict[int, list[tuple]] = {}
            for row in fk_rows:
                grouped.setdefault(row[0], []).append(row)
            fks = []
            for fk_id in sorted(grouped):
                parts = sorted(grouped[fk_id], key=lambda r: r[1])  # seq order
                fks.append(
                    ForeignKey(
                        tuple(p[3] for p in parts),
                        parts[0][2],
                        tuple(p[4] for p in parts),
                    )
                )
            tables.append(
                TableDef(table_name, tuple(columns), tuple(c for _, c in pk_cols), tuple(fks))
            )
    finally:
        conn.close()
    return PhysicalModel(tuple(tables), source=descriptor)


# --- validation -----------------------------------------------------------------


def validate_physical(model: PhysicalModel) -> list[Diagnostic]:
    """Structural diagnostics for hand-built models.

    Models produced by parse_ddl or introspect come back clean; the checks
    exist for models assembled directly in code.
    """
    diagnostics: list[Diagnostic] = []
    seen_tables: set[str] = set()
    for table in model.tables:
        key = table.name.lower()
        if key in seen_tables:
            diagnostics.append(
                Diagnostic("duplicate_table", f"duplicate table name {table.name}", table.name)
            )
        seen_tables.add(key)
    for table in model.tables:
        seen_cols: set[str] = set()
        for col in table.columns:
            ckey = col.name.lower()
            if ckey in seen_cols:
                diagnostics.append(
                    Diagnostic(
                        "duplicate_column",
                        f"duplicate column {col.name} in table {table.name}",
                        f"{table.name}.{col.name}",
                    )
                )
            seen_cols.add(ckey)
            if col.sql_type not in SQL_TYPES:
                diagnostics.append(
                    Diagnostic(
                        "bad_type",
                        f"column {table.name}.{col.name} has type {col.sql_type} "
                        "outside the supported set",
                        f"{table.name}.{col.name}",
                    )
                )
        for pk_col in table.primary_key:
            if table.column(pk_col) is None:
                diagnostics.append(
                    Diagnostic(
                        "missing_pk_column",
                        f"Column {pk_col} does not exist in table {table.name}",
                        f"{table.name}.{pk_col}",
                    )
                )
        for fk in table.foreign_keys:
            target = model.table(fk.target_table)
            if target is None:
                diagnostics.append(
                    Diagnostic(
                        "missing_table",
                        f"Table {fk.target_table} does not exist",
                        fk.target_table,
                    )
                )
                continue
            if len(fk.columns) != len(fk.target_columns):
                diagnostics.append(
                    Diagnostic(
                        "fk_arity",
                        f"foreign key on {table.name} maps {len(fk.columns)} columns "
                        f"to {len(fk.target_columns)}",
                        table.name,
                    )
                )
            for col in fk.columns:
                if table.column(col) is None:
                    diagnostics.append(
                        Diagnostic(
                            "missing_column",
                            f"Column {col} does not exist in table {table.name}",
                            f"{table.name}.{col}",
                        )
                    )
            for col in fk.target_columns:
                if target.column(col) is None:
                    diagnostics.append(
                        Diagnostic(
                            "missing_column",
                            f"Column {col} does not exist in table {target.name}",
                            f"{target.name}.{col}",
                        )
                    )
    return diagnostics
