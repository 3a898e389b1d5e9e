import pytest

from autobir.embedding import DeterministicHashEmbedder
from autobir.physical import open_connection
from autobir.sampledata import build_demo_db
from autobir.search import build_index

from helpers import annotated_demo_ontology


@pytest.fixture(scope="session")
def demo_db(tmp_path_factory):
    path = tmp_path_factory.mktemp("dbs") / "demo.db"
    build_demo_db(path)
    return path


@pytest.fixture(scope="session")
def demo():
    """(model, annotated ontology, bindings) for the bundled dataset."""
    return annotated_demo_ontology()


@pytest.fixture(scope="session")
def embedder():
    return DeterministicHashEmbedder()


@pytest.fixture(scope="session")
def demo_index(demo, embedder):
    _, onto, _ = demo
    return build_index(onto, embedder, source_id="demo")


@pytest.fixture
def demo_conn(demo_db):
    conn = open_connection(f"file:{demo_db}", read_only=True)
    yield conn
    conn.close()
