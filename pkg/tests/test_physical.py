import sqlite3

import pytest
from hypothesis import given, strategies as st

from autobir.errors import (
    DdlSyntaxError,
    EngineConnectionError,
    SchemaReferenceError,
    UnsupportedTypeWarning,
)
from autobir.physical import (
    ColumnDef,
    PhysicalModel,
    SQL_TYPES,
    TableDef,
    introspect,
    open_connection,
    parse_ddl,
    serialize_ddl,
    validate_physical,
)
from autobir.sampledata import DEMO_DDL, build_demo_db

from helpers import fk_count_oracle


def test_demo_ddl_table_and_fk_counts():
    model = parse_ddl(DEMO_DDL)
    assert len(model.tables) == 8
    total_fks = sum(len(t.foreign_keys) for t in model.tables)
    # oracle: count FOREIGN KEY clauses in the raw text, independent of the parser
    assert total_fks == fk_count_oracle()
    assert total_fks == 7


def test_composite_keys_parsed():
    model = parse_ddl(DEMO_DDL)
    sop = model.table("specialofferproduct")
    assert sop.primary_key == ("SpecialOfferID", "ProductID")
    assert len(sop.foreign_keys) == 1
    assert sop.foreign_keys[0].target_table == "Product"
    inv = model.table("ProductInventory")
    assert inv.primary_key == ("ProductID", "LocationID")


def test_table_lookup_case_insensitive():
    model = parse_ddl(DEMO_DDL)
    assert model.table("PRODUCT").name == "Product"
    assert model.table("product").column("PRODUCTNUMBER").name == "ProductNumber"
    assert model.table("nope") is None


def test_not_null_round_trips():
    model = parse_ddl("CREATE TABLE t (a INT NOT NULL, b VARCHAR);")
    cols = model.table("t").columns
    assert not cols[0].nullable and cols[1].nullable
    assert parse_ddl(serialize_ddl(model)) == PhysicalModel(model.tables, source="ddl")


def test_unknown_type_rejected_in_ddl():
    with pytest.raises(DdlSyntaxError) as err:
        parse_ddl("CREATE TABLE t (a BLOB);")
    assert "unsupported column type 'BLOB'" in str(err.value)


def test_fk_to_missing_table_rejected():
    ddl = (
        "CREATE TABLE a (x INT, FOREIGN KEY (x) REFERENCES ghost(y));"
    )
    with pytest.raises(SchemaReferenceError):
        parse_ddl(ddl)


def test_duplicate_table_rejected():
    with pytest.raises(SchemaReferenceError):
        parse_ddl("CREATE TABLE t (a INT); CREATE TABLE T (b INT);")


def test_serialize_is_fixed_point_on_demo():
    model = parse_ddl(DEMO_DDL)
    text = serialize_ddl(model)
    assert parse_ddl(text) == model


_ident = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,8}", fullmatch=True).filter(
    lambda s: s.upper() not in {"NOT", "NULL", "PRIMARY", "FOREIGN", "KEY", "CREATE", "TABLE", "REFERENCES"}
)


@st.composite
def _models(draw):
    n_tables = draw(st.integers(1, 3))
    names = draw(st.lists(_ident, min_size=n_tables, max_size=n_tables,
                          unique_by=lambda s: s.lower()))
    tables = []
    for name in names:
        n_cols = draw(st.integers(1, 4))
        col_names = draw(st.lists(_ident, min_size=n_cols, max_size=n_cols,
                                  unique_by=lambda s: s.lower()))
        cols = tuple(
            ColumnDef(c, draw(st.sampled_from(SQL_TYPES)), draw(st.booleans()))
            for c in col_names
        )
        pk = (cols[0].name,) if draw(st.booleans()) else ()
        tables.append(TableDef(name, cols, pk))
    return PhysicalModel(tuple(tables), source="ddl")


@given(_models())
def test_serialize_parse_round_trip(model):
    assert parse_ddl(serialize_ddl(model)) == model


def test_introspect_matches_parsed_ddl(demo_db):
    live = introspect(f"file:{demo_db}")
    parsed = parse_ddl(DEMO_DDL)
    assert {t.name for t in live.tables} == {t.name for t in parsed.tables}
    for lt in live.tables:
        pt = parsed.table(lt.name)
        assert lt.columns == pt.columns, lt.name
        assert lt.primary_key == pt.primary_key, lt.name
        # the engine reports FKs in its own order; compare as sets
        assert set(lt.foreign_keys) == set(pt.foreign_keys), lt.name


def test_introspect_warns_on_engine_only_type(tmp_path):
    path = tmp_path / "odd.db"
    conn = sqlite3.connect(path)
    conn.execute("CREATE TABLE blobby (payload BLOB, n INTEGER)")
    conn.close()
    with pytest.warns(UnsupportedTypeWarning, match="blobby.payload"):
        model = introspect(f"file:{path}")
    cols = model.table("blobby").columns
    assert cols[0].sql_type == "VARCHAR"
    assert cols[1].sql_type == "INT"


def test_open_connection_rejects_non_file_descriptor():
    with pytest.raises(EngineConnectionError):
        open_connection("postgres://host/db")


def test_read_only_connection_blocks_writes(demo_db):
    conn = open_connection(f"file:{demo_db}", read_only=True)
    try:
        with pytest.raises(sqlite3.OperationalError):
            conn.execute("INSERT INTO Currency VALUES ('XXX', 'Fake')")
    finally:
        conn.close()


def test_validate_flags_handbuilt_mistakes():
    model = PhysicalModel((
        TableDef("t", (ColumnDef("a", "INT"), ColumnDef("A", "INT"),
                       ColumnDef("b", "GEOGRAPHY")), primary_key=("missing",)),
    ))
    codes = {d.code for d in validate_physical(model)}
    assert {"duplicate_column", "bad_type", "missing_pk_column"} <= codes


def test_build_demo_db_is_rerunnable(tmp_path):
    path = tmp_path / "demo.db"
    build_demo_db(str(path))
    build_demo_db(str(path))
    conn = sqlite3.connect(path)
    try:
        n = conn.execute("SELECT COUNT(*) FROM Product").fetchone()[0]
    finally:
        conn.close()
    assert n == 5
