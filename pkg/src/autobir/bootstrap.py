"""Source onboarding: introspect, derive, refine, index, publish.

Shared by the CLI and the HTTP service so both paths produce identical
catalog contents for the same inputs.
"""

from __future__ import annotations

import sqlite3
import uuid
from pathlib import Path

from .catalog import Catalog, DataSourceRecord, VersionEntry
from .errors import NotFoundError
from .ontology import annotate, derive_ontology
from .physical import introspect, parse_ddl
from .policies import apply_policies, parse_policy_file
from .search import IndexConfig, build_index


def materialize_ddl(ddl: str, directory: Path | str, stem: str = "uploaded") -> str:
    """Create a database file from DDL text and return its descriptor.

    The text is parsed first so grammar violations surface with positions
    instead of engine errors against a half-built file.
    """
    parse_ddl(ddl)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{stem}-{uuid.uuid4().hex[:8]}.db"
    connection = sqlite3.connect(path)
    try:
        connection.executescript(ddl)
        connection.commit()
    finally:
        connection.close()
    return f"file:{path}"


def setup_source(
    catalog: Catalog,
    embedder,
    name: str,
    connection: str,
    tenant: str = "default",
    collection: str = "default",
    annotations: dict[str, dict[str, str]] | None = None,
    policy_text: str | None = None,
    index_properties: bool = False,
    new_version: bool = False,
) -> tuple[DataSourceRecord, VersionEntry]:
    model = introspect(connection)
    onto, bind = derive_ontology(model)
    for entity_id, pairs in (annotations or {}).items():
        for key, text in pairs.items():
            onto = annotate(onto, entity_id, key, text)
    if policy_text:
        policies = parse_policy_file(policy_text)
        onto, bind, _ = apply_policies(onto, bind, policies)
    record = None
    if new_version:
        # republish against the already registered source of the same name
        try:
            record = catalog.find_record(name, tenant)
        except NotFoundError:
            record = None
    if record is None:
        record = catalog.register_source(name, connection, tenant, collection)
    index = build_index(
        onto, embedder, source_id=record.id,
        config=IndexConfig(index_properties=index_properties),
    )
    entry = catalog.publish_version(record.id, onto, bind, index)
    return record, entry
