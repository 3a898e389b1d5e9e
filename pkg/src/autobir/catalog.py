"""Versioned catalog of data sources and their derived artifacts.

Layout under the catalog root:

    catalog.manifest                     manifest of records and versions
    sources/<id>/v<N>/model.ddl          physical model, DDL text
    sources/<id>/v<N>/model.onto         ontology, block format
    sources/<id>/v<N>/model.bind         bindings, arrow format
    sources/<id>/v<N>/index.idx          semantic index (optional)
    testcases/<id>                       archived test cases

Publishes are append-only and atomic: artifacts land in a temp directory
that is renamed into place, and the manifest is replaced last, so a crash
mid-publish leaves the previous latest version fully readable. Writes are
serialized per source with an advisory file lock.
"""

from __future__ import annotations

import json
import logging
import os
import time
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

from filelock import FileLock

from .errors import CorruptArtifactError, DuplicateNameError, NotFoundError, StorageError
from .ontology import (
    BindingSet,
    Ontology,
    deserialize_bindings,
    deserialize_ontology,
    serialize_bindings,
    serialize_ontology,
)
from .physical import parse_ddl, serialize_ddl
from .search import SemanticIndex, load_index, save_index

logger = logging.getLogger(__name__)

MANIFEST_NAME = "catalog.manifest"


@dataclass(frozen=True)
class VersionEntry:
    version: int
    model_ref: str
    ontology_ref: str
    bindings_ref: str
    index_ref: str | None
    created_at: float
    checksum: str


@dataclass(frozen=True)
class DataSourceRecord:
    id: str
    name: str
    connection: str
    tenant: str
    collection: str
    created_at: float
    versions: tuple[VersionEntry, ...] = ()

    def latest(self) -> VersionEntry | None:
        return self.versions[-1] if self.versions else None

    def version(self, number: int) -> VersionEntry | None:
        for entry in self.versions:
            if entry.version == number:
                return entry
        return None


@dataclass(frozen=True)
class ResolvedSource:
    record: DataSourceRecord
    entry: VersionEntry
    ontology: Ontology
    bindings: BindingSet


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp-{uuid.uuid4().hex[:8]}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


class Catalog:
    """File-tree backed catalog; safe against concurrent writers on one host."""

    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "sources").mkdir(exist_ok=True)
        (self.root / "testcases").mkdir(exist_ok=True)

    # manifest ----------------------------------------------------------------

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    def _manifest_lock(self) -> FileLock:
        return FileLock(str(self.root / "catalog.lock"))

    def _source_lock(self, source_id: str) -> FileLock:
        return FileLock(str(self.root / "sources" / f"{source_id}.lock"))

    def _load_manifest(self) -> list[DataSourceRecord]:
        if not self.manifest_path.exists():
            return []
        try:
            raw = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise CorruptArtifactError(
                f"manifest unreadable: {exc}", path=str(self.manifest_path)
            ) from exc
        records = []
        for rec in raw.get("records", []):
            versions = tuple(
                VersionEntry(
                    v["version"], v["model_ref"], v["ontology_ref"], v["bindings_ref"],
                    v.get("index_ref"), v["created_at"], v["checksum"],
                )
                for v in rec.get("versions", [])
            )
            records.append(
                DataSourceRecord(
                    rec["id"], rec["name"], rec["connection"], rec["tenant"],
                    rec.get("collection", "default"), rec["created_at"], versions,
                )
            )
        return records

    def _store_manifest(self, records: list[DataSourceRecord]) -> None:
        payload = {
            "records": [
                {
                    "id": r.id,
                    "name": r.name,
                    "connection": r.connection,
                    "tenant": r.tenant,
                    "collection": r.collection,
                    "created_at": r.created_at,
                    "versions": [
                        {
                            "version": v.version,
                            "model_ref": v.model_ref,
                            "ontology_ref": v.ontology_ref,
                            "bindings_ref": v.bindings_ref,
                            "index_ref": v.index_ref,
                            "created_at": v.created_at,
                            "checksum": v.checksum,
                        }
                        for v in r.versions
                    ],
                }
                for r in records
            ]
        }
        _atomic_write(self.manifest_path, json.dumps(payload, indent=2) + "\n")

    # records -------------------------------------------------------------------

    def register_source(
        self, name: str, connection: str, tenant: str, collection: str = "default"
    ) -> DataSourceRecord:
        """Create a record; (tenant, name) must be unique."""
        if not name or not tenant:
            raise StorageError("source name and tenant are required")
        with self._manifest_lock():
            records = self._load_manifest()
            for rec in records:
                if rec.tenant == tenant and rec.name == name:
                    raise DuplicateNameError(
                        f"source {name!r} already exists for tenant {tenant!r}",
                        name=name, tenant=tenant,
                    )
            record = DataSourceRecord(
                id=f"ds-{uuid.uuid4().hex[:12]}",
                name=name,
                connection=connection,
                tenant=tenant,
                collection=collection,
                created_at=time.time(),
            )
            records.append(record)
            self._store_manifest(records)
        return record

    def get_record(self, source_id: str) -> DataSourceRecord:
        for rec in self._load_manifest():
            if rec.id == source_id:
                return rec
        raise NotFoundError(f"unknown data source {source_id}", source_id=source_id)

    def find_record(self, name: str, tenant: str) -> DataSourceRecord:
        for rec in self._load_manifest():
            if rec.tenant == tenant and rec.name == name:
                return rec
        raise NotFoundError(
            f"no data source named {name!r} for tenant {tenant!r}",
            name=name, tenant=tenant,
        )

    def list_sources(
        self, tenant: str | None = None, collection: str | None = None
    ) -> list[DataSourceRecord]:
        records = self._load_manifest()
        if tenant is not None:
            records = [r for r in records if r.tenant == tenant]
        if collection is not None:
            records = [r for r in records if r.collection == collection]
        return records

    # versions ---------------------------------------------------------------------

    def publish_version(
        self,
        source_id: str,
        onto: Ontology,
        bind: BindingSet,
        index: SemanticIndex | None = None,
    ) -> VersionEntry:
        """Write artifacts and append the next version number atomically."""
        import hashlib

        onto_text = serialize_ontology(onto)
        bind_text = serialize_bindings(bind)
        ddl_text = serialize_ddl(bind.model)
        checksum = hashlib.sha256(
            (ddl_text + "\x00" + onto_text + "\x00" + bind_text).encode("utf-8")
        ).hexdigest()

        with self._source_lock(source_id):
            record = self.get_record(source_id)
            next_version = (record.latest().version + 1) if record.versions else 1
            source_dir = self.root / "sources" / source_id
            source_dir.mkdir(parents=True, exist_ok=True)
            staging = source_dir / f".staging-{uuid.uuid4().hex[:8]}"
            staging.mkdir()
            try:
                (staging / "model.ddl").write_text(ddl_text, encoding="utf-8")
                (staging / "model.onto").write_text(onto_text, encoding="utf-8")
                (staging / "model.bind").write_text(bind_text, encoding="utf-8")
                index_ref = None
                if index is not None:
                    save_index(index, staging / "index.idx")
                    index_ref = f"sources/{source_id}/v{next_version}/index.idx"
                final_dir = source_dir / f"v{next_version}"
                os.rename(staging, final_dir)
            except OSError as exc:
                raise StorageError(f"publish failed: {exc}") from exc
            entry = VersionEntry(
                version=next_version,
                model_ref=f"sources/{source_id}/v{next_version}/model.ddl",
                ontology_ref=f"sources/{source_id}/v{next_version}/model.onto",
                bindings_ref=f"sources/{source_id}/v{next_version}/model.bind",
                index_ref=index_ref,
                created_at=time.time(),
                checksum=checksum,
            )
            with self._manifest_lock():
                records = self._load_manifest()
                updated = [
                    replace(r, versions=r.versions + (entry,)) if r.id == source_id else r
                    for r in records
                ]
                self._store_manifest(updated)
        return entry

    def _read_artifact(self, ref: str) -> str:
        path = self.root / ref
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CorruptArtifactError(f"artifact unreadable: {exc}", path=str(path)) from exc

    def resolve(self, source_id: str, version: int | None = None) -> ResolvedSource:
        """Load a version's ontology and bindings; latest when unspecified."""
        record = self.get_record(source_id)
        entry = record.latest() if version is None else record.version(version)
        if entry is None:
            raise NotFoundError(
                f"source {source_id} has no version {version}",
                source_id=source_id, version=version,
            )
        ddl_text = self._read_artifact(entry.model_ref)
        onto_text = self._read_artifact(entry.ontology_ref)
        bind_text = self._read_artifact(entry.bindings_ref)
        try:
            model = parse_ddl(ddl_text)
            onto = deserialize_ontology(onto_text)
            bind = deserialize_bindings(bind_text, model)
        except Exception as exc:
            raise CorruptArtifactError(
                f"artifact for {source_id} v{entry.version} failed to parse: {exc}",
                path=str(self.root / entry.ontology_ref),
            ) from exc
        return ResolvedSource(record, entry, onto, bind)

    def load_version_index(self, entry: VersionEntry, embedder) -> SemanticIndex | None:
        if entry.index_ref is None:
            return None
        path = self.root / entry.index_ref
        try:
            return load_index(path, embedder)
        except (OSError, ValueError) as exc:
            raise CorruptArtifactError(
                f"index unreadable: {exc}", path=str(path)
            ) from exc
