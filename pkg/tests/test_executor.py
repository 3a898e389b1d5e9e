import pytest
from hypothesis import given, settings, strategies as st

from autobir.errors import EngineError, GuardError
from autobir.executor import ResultSet, execute_query, infer_column_types

from helpers import EURO_QUERY, euro_earnings_oracle


def test_canonical_query_matches_oracle(demo_conn):
    result = execute_query(demo_conn, EURO_QUERY)
    assert result.columns == ("ProductNumber", "TotalEarnings")
    got = dict(result.rows)
    oracle = euro_earnings_oracle()
    assert set(got) == set(oracle)
    for key, total in oracle.items():
        assert got[key] == pytest.approx(total, abs=1e-9)


def test_result_set_shape(demo_conn):
    result = execute_query(demo_conn, "SELECT Name, ProductID FROM Product ORDER BY ProductID")
    assert isinstance(result, ResultSet)
    assert result.column_types == ("VARCHAR", "INT")
    assert result.total_rows == 5
    assert len(result.rows) == 5
    assert result.limit == 100 and result.offset == 0


@settings(max_examples=40, deadline=None)
@given(limit=st.integers(0, 8), offset=st.integers(0, 8))
def test_pagination_is_a_window_onto_the_full_result(demo_conn_module, limit, offset):
    full = execute_query(demo_conn_module, "SELECT Name FROM Product ORDER BY ProductID", limit=100)
    page = execute_query(
        demo_conn_module, "SELECT Name FROM Product ORDER BY ProductID",
        limit=limit, offset=offset,
    )
    assert page.rows == full.rows[offset:offset + limit]
    assert page.total_rows == full.total_rows == 5
    assert page.limit == limit and page.offset == offset


@pytest.fixture(scope="module")
def demo_conn_module(demo_db):
    from autobir.physical import open_connection
    conn = open_connection(f"file:{demo_db}", read_only=True)
    yield conn
    conn.close()


def test_query_with_its_own_limit_is_wrapped(demo_conn):
    page = execute_query(demo_conn, "SELECT Name FROM Product ORDER BY ProductID LIMIT 2", limit=1)
    assert len(page.rows) == 1
    # total counts the query as written, inner LIMIT included
    assert page.total_rows == 2


def test_offset_past_end_is_empty(demo_conn):
    page = execute_query(demo_conn, "SELECT Name FROM Product", limit=10, offset=50)
    assert page.rows == ()
    assert page.total_rows == 5


def test_guard_rejects_non_select(demo_conn):
    with pytest.raises(GuardError, match="statement is not read-only"):
        execute_query(demo_conn, "DROP TABLE Product")
    with pytest.raises(GuardError):
        execute_query(demo_conn, "SELECT 1; DROP TABLE Product")


def test_negative_paging_rejected(demo_conn):
    with pytest.raises(EngineError):
        execute_query(demo_conn, "SELECT 1", limit=-1)
    with pytest.raises(EngineError):
        execute_query(demo_conn, "SELECT 1", offset=-3)


def test_engine_errors_are_wrapped(demo_conn):
    with pytest.raises(EngineError):
        execute_query(demo_conn, "SELECT Ghost FROM Product")


def test_infer_column_types_rules():
    rows = [
        (True, 1, 1.5, "x", None),
        (False, 2, 2, "y", None),
    ]
    assert infer_column_types(rows, 5) == ("BOOLEAN", "INT", "FLOAT", "VARCHAR", "VARCHAR")
    # int/float mix widens to FLOAT; all-None falls back to VARCHAR
    assert infer_column_types([], 2) == ("VARCHAR", "VARCHAR")
    assert infer_column_types([(None, 3)], 2) == ("VARCHAR", "INT")


def test_rows_are_immutable_tuples(demo_conn):
    result = execute_query(demo_conn, "SELECT Name FROM Product", limit=2)
    assert isinstance(result.rows, tuple)
    assert all(isinstance(row, tuple) for row in result.rows)
