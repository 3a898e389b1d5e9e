"""HTTP facade over the pipeline.

Conversations are server-side objects holding a bounded history, a grounded
connection, and the last generation state. One request at a time per
conversation: concurrent calls get a 409 instead of interleaved histories.

All errors use one JSON shape: {"code", "message", "details"}.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .bootstrap import materialize_ddl, setup_source
from .catalog import Catalog
from .charts import ChartSpec, generate_chart
from .checkers import repair_instruction, run_battery
from .config import AppConfig, build_embedder, build_provider
from .errors import (
    AutobirError,
    ChartGenerationExhausted,
    CorruptArtifactError,
    DuplicateNameError,
    EngineConnectionError,
    NotFoundError,
    ProviderError,
    ScriptExhaustedError,
    StorageError,
)
from .executor import ResultSet, execute_query
from .ontology import ground, serialize_bindings, serialize_ontology
from .physical import open_connection
from .pipeline import (
    EXPLANATION_STYLES,
    Conversation,
    GenerationDeps,
    GenerationResult,
    explain_query,
    generate_query,
)
from .search import SubOntologyBudget, build_index, knn_search
from .sql import SqlSyntaxError
from .testcases import (
    archive_testcase,
    build_testcase,
    list_testcases,
    load_testcase,
    replay_testcase,
    trail_from_attempts,
)


class ConversationBusy(AutobirError):
    code = "busy"


_STATUS_BY_TYPE: tuple[tuple[type, int], ...] = (
    (NotFoundError, 404),
    (DuplicateNameError, 409),
    (ConversationBusy, 409),
    (ScriptExhaustedError, 503),
    (ProviderError, 502),
    (EngineConnectionError, 502),
    (CorruptArtifactError, 500),
    (StorageError, 500),
    (ChartGenerationExhausted, 422),
)


def _status_for(exc: AutobirError) -> int:
    for etype, status in _STATUS_BY_TYPE:
        if isinstance(exc, etype):
            return status
    return 400


class SetupRequest(BaseModel):
    name: str
    connection: str | None = None
    ddl: str | None = None
    tenant: str = "default"
    collection: str = "default"
    annotations: dict[str, dict[str, str]] = {}
    policies: str | None = None
    new_version: bool = False


class ConversationRequest(BaseModel):
    source_id: str
    version: int | None = None


class AskRequest(BaseModel):
    question: str
    style: str = "Simple"


class ExecuteRequest(BaseModel):
    query: str | None = None
    limit: int = 100
    offset: int = 0


class ValidateRequest(BaseModel):
    query: str


class ChartRequest(BaseModel):
    question: str | None = None


class ExplainRequest(BaseModel):
    style: str = "Simple"


@dataclass
class ConversationState:
    conversation: Conversation
    source_id: str
    version: int
    deps: GenerationDeps
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_question: str | None = None
    last_result: GenerationResult | None = None
    last_explanation: str | None = None
    last_execution: ResultSet | None = None
    last_chart: ChartSpec | None = None


class ServiceState:
    def __init__(self, config: AppConfig, catalog: Catalog, embedder, provider) -> None:
        self.config = config
        self.catalog = catalog
        self.embedder = embedder
        self.provider = provider
        self.conversations: dict[str, ConversationState] = {}
        self.registry_lock = threading.Lock()

    def budget(self) -> SubOntologyBudget:
        gen = self.config.generation
        return SubOntologyBudget(
            max_classes=gen.max_classes,
            max_path_len=gen.max_path_len,
            seed_k=gen.seed_k,
            min_similarity=gen.min_similarity,
        )

    def conversation(self, cid: str) -> ConversationState:
        with self.registry_lock:
            cstate = self.conversations.get(cid)
        if cstate is None:
            raise NotFoundError(f"unknown conversation {cid}", conversation_id=cid)
        return cstate


def _result_payload(result: ResultSet) -> dict:
    return {
        "columns": list(result.columns),
        "column_types": list(result.column_types),
        "rows": [list(row) for row in result.rows],
        "total_rows": result.total_rows,
        "limit": result.limit,
        "offset": result.offset,
    }


def _sub_ontology_payload(result: GenerationResult, deps: GenerationDeps) -> dict:
    classes = set(result.sub_ontology.classes)
    edges = [
        {"source": s, "target": t, "property": p}
        for s, t, p in deps.ontology.edges()
        if s in classes and t in classes
    ]
    return {
        "classes": list(result.sub_ontology.classes),
        "seeds": list(result.sub_ontology.seed_classes),
        "scores": {k: v for k, v in sorted(result.sub_ontology.scores.items())},
        "paths": [list(p) for p in result.sub_ontology.included_paths],
        "edges": edges,
    }


def _reports_payload(reports) -> list[dict]:
    return [
        {"status": r.status, "checker_type": r.checker_type, "message": r.message}
        for r in reports
    ]


def create_app(
    config: AppConfig | None = None,
    catalog: Catalog | None = None,
    embedder=None,
    provider=None,
) -> FastAPI:
    config = config or AppConfig()
    catalog = catalog or Catalog(config.catalog_root)
    embedder = embedder if embedder is not None else build_embedder(config.embedder)
    provider = provider if provider is not None else build_provider(config.provider)
    state = ServiceState(config, catalog, embedder, provider)

    app = FastAPI(title="autobir")
    app.state.autobir = state

    @app.exception_handler(AutobirError)
    def _autobir_error(request, exc: AutobirError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": str(exc), "details": exc.details},
        )

    @app.exception_handler(SqlSyntaxError)
    def _sql_error(request, exc: SqlSyntaxError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "sql_syntax",
                "message": str(exc),
                "details": {"line": exc.line, "column": exc.column},
            },
        )

    @app.exception_handler(RequestValidationError)
    def _validation_error(request, exc: RequestValidationError):
        errors = [
            {"loc": [str(part) for part in e.get("loc", [])], "msg": e.get("msg", "")}
            for e in exc.errors()
        ]
        return JSONResponse(
            status_code=422,
            content={
                "code": "validation",
                "message": "request body failed validation",
                "details": {"errors": errors},
            },
        )

    def _locked(cstate: ConversationState):
        if not cstate.lock.acquire(blocking=False):
            raise ConversationBusy("another request is using this conversation")
        return cstate.lock

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sources", status_code=201)
    @app.post("/datasources", status_code=201)
    def create_source(body: SetupRequest):
        if (body.connection is None) == (body.ddl is None):
            raise AutobirError("exactly one of connection or ddl is required")
        connection = body.connection
        if connection is None:
            connection = materialize_ddl(body.ddl, state.catalog.root / "uploads")
        record, entry = setup_source(
            state.catalog,
            state.embedder,
            name=body.name,
            connection=connection,
            tenant=body.tenant,
            collection=body.collection,
            annotations=body.annotations,
            policy_text=body.policies,
            new_version=body.new_version,
        )
        return {
            "id": record.id,
            "name": record.name,
            "tenant": record.tenant,
            "collection": record.collection,
            "version": entry.version,
            "checksum": entry.checksum,
        }

    @app.get("/sources")
    @app.get("/datasources")
    def list_sources(tenant: str | None = None, collection: str | None = None):
        records = state.catalog.list_sources(tenant=tenant, collection=collection)
        return {
            "sources": [
                {
                    "id": r.id,
                    "name": r.name,
                    "tenant": r.tenant,
                    "collection": r.collection,
                    "versions": [v.version for v in r.versions],
                }
                for r in records
            ]
        }

    @app.get("/sources/{source_id}")
    def get_source(source_id: str):
        record = state.catalog.get_record(source_id)
        return {
            "id": record.id,
            "name": record.name,
            "tenant": record.tenant,
            "collection": record.collection,
            "connection": record.connection,
            "versions": [
                {
                    "version": v.version,
                    "created_at": v.created_at,
                    "checksum": v.checksum,
                }
                for v in record.versions
            ],
        }

    @app.get("/sources/{source_id}/ontology")
    @app.get("/ontologies/{source_id}")
    def get_ontology(source_id: str, version: int | None = None):
        resolved = state.catalog.resolve(source_id, version)
        onto = resolved.ontology
        return {
            "version": resolved.entry.version,
            "ontology": serialize_ontology(onto),
            "bindings": serialize_bindings(resolved.bindings),
            "classes": [
                {
                    "id": cls.id,
                    "label": cls.label,
                    "data_properties": [
                        {"name": p.name, "type": p.sql_type} for p in cls.data_properties
                    ],
                    "object_properties": [
                        {"name": p.name, "target": p.target}
                        for p in cls.object_properties
                    ],
                    "annotations": dict(onto.annotations.get(cls.id, {})),
                }
                for cls in onto.classes
            ],
            "edges": [
                {"source": s, "target": t, "property": p} for s, t, p in onto.edges()
            ],
        }

    @app.post("/conversations", status_code=201)
    def create_conversation(body: ConversationRequest):
        resolved = state.catalog.resolve(body.source_id, body.version)
        connection = open_connection(
            resolved.record.connection, read_only=True, cross_thread=True
        )
        index = state.catalog.load_version_index(resolved.entry, state.embedder)
        if index is None:
            index = build_index(
                resolved.ontology, state.embedder, source_id=resolved.record.id
            )
        deps = GenerationDeps(
            provider=state.provider,
            index=index,
            ontology=resolved.ontology,
            bindings=resolved.bindings,
            connection=connection,
            budget=state.budget(),
            max_iterations=state.config.generation.max_iterations,
        )
        cid = f"c-{uuid.uuid4().hex[:12]}"
        conversation = Conversation(cid, state.config.generation.history_limit)
        cstate = ConversationState(
            conversation=conversation,
            source_id=resolved.record.id,
            version=resolved.entry.version,
            deps=deps,
        )
        with state.registry_lock:
            state.conversations[cid] = cstate
        return {
            "conversation_id": cid,
            "source_id": resolved.record.id,
            "version": resolved.entry.version,
        }

    @app.delete("/conversations/{cid}")
    def drop_conversation(cid: str):
        cstate = state.conversation(cid)
        with state.registry_lock:
            state.conversations.pop(cid, None)
        try:
            cstate.deps.connection.close()
        except Exception:
            pass
        return {"conversation_id": cid, "deleted": True}

    @app.post("/conversations/{cid}/ask")
    def ask(cid: str, body: AskRequest):
        cstate = state.conversation(cid)
        if body.style not in EXPLANATION_STYLES:
            raise AutobirError(
                f"unknown explanation style {body.style!r}", style=body.style
            )
        lock = _locked(cstate)
        try:
            result = generate_query(body.question, cstate.conversation, cstate.deps)
            explanation = None
            execution = None
            if result.accepted:
                sub_text = serialize_ontology(
                    cstate.deps.ontology, only=set(result.sub_ontology.classes)
                )
                explanation = explain_query(
                    body.question, result.query, sub_text, state.provider,
                    style=body.style,
                )
                execution = execute_query(cstate.deps.connection, result.query)
            cstate.last_question = body.question
            cstate.last_result = result
            cstate.last_explanation = explanation
            cstate.last_execution = execution
            cstate.last_chart = None
            return {
                "status": result.status,
                "query": result.query,
                "explanation": explanation,
                "terms": list(result.terms),
                "schema_sql": result.schema_sql,
                "sub_ontology": _sub_ontology_payload(result, cstate.deps),
                "attempts": trail_from_attempts(result.attempts),
                "result": _result_payload(execution) if execution else None,
            }
        finally:
            lock.release()

    @app.post("/conversations/{cid}/explain")
    def explain(cid: str, body: ExplainRequest | None = None):
        cstate = state.conversation(cid)
        style = body.style if body else "Simple"
        if style not in EXPLANATION_STYLES:
            raise AutobirError(f"unknown explanation style {style!r}", style=style)
        lock = _locked(cstate)
        try:
            result = cstate.last_result
            if result is None or not result.accepted:
                raise AutobirError("no accepted query to explain")
            sub_text = serialize_ontology(
                cstate.deps.ontology, only=set(result.sub_ontology.classes)
            )
            text = explain_query(
                cstate.last_question or "", result.query, sub_text,
                state.provider, style=style,
            )
            cstate.last_explanation = text
            return {"text": text, "style": style}
        finally:
            lock.release()

    @app.post("/conversations/{cid}/execute")
    def execute(cid: str, body: ExecuteRequest):
        cstate = state.conversation(cid)
        lock = _locked(cstate)
        try:
            query = body.query
            if query is None:
                if cstate.last_result is None or not cstate.last_result.accepted:
                    raise AutobirError("no accepted query to execute")
                query = cstate.last_result.query
            result = execute_query(
                cstate.deps.connection, query, limit=body.limit, offset=body.offset
            )
            cstate.last_execution = result
            return {"query": query, "result": _result_payload(result)}
        finally:
            lock.release()

    @app.post("/conversations/{cid}/validate")
    def validate(cid: str, body: ValidateRequest):
        cstate = state.conversation(cid)
        if cstate.last_result is not None:
            grounded = cstate.last_result.grounded
        else:
            grounded = ground(cstate.deps.ontology.class_ids(), cstate.deps.bindings)
        reports = run_battery(body.query, grounded, cstate.deps.connection)
        ok = all(r.ok for r in reports)
        return {
            "ok": ok,
            "reports": _reports_payload(reports),
            "repair": "" if ok else repair_instruction(reports),
        }

    @app.post("/conversations/{cid}/chart")
    @app.post("/conversations/{cid}/visualize")
    def chart(cid: str, body: ChartRequest | None = None):
        cstate = state.conversation(cid)
        lock = _locked(cstate)
        try:
            if cstate.last_execution is None:
                raise AutobirError("no result to chart, execute a query first")
            question = (body.question if body else None) or cstate.last_question or ""
            spec = generate_chart(question, cstate.last_execution, state.provider)
            cstate.last_chart = spec
            return spec.to_dict()
        finally:
            lock.release()

    @app.post("/conversations/{cid}/archive", status_code=201)
    def archive(cid: str):
        cstate = state.conversation(cid)
        lock = _locked(cstate)
        try:
            result = cstate.last_result
            if result is None or not result.accepted:
                raise AutobirError("no accepted query to archive")
            if cstate.last_execution is None:
                raise AutobirError("no execution result to archive")
            classes = set(result.sub_ontology.classes)
            record = build_testcase(
                source=cstate.source_id,
                question=cstate.last_question or "",
                query=result.query,
                explanation=cstate.last_explanation or "",
                result=cstate.last_execution,
                sub_ontology_text=serialize_ontology(cstate.deps.ontology, only=classes),
                bindings_text=serialize_bindings(cstate.deps.bindings, only=classes),
                attempts=result.attempts,
                chart_spec=cstate.last_chart.to_dict() if cstate.last_chart else None,
            )
            path = archive_testcase(state.catalog.root, record)
            return {"testcase_id": record.id, "path": str(path)}
        finally:
            lock.release()

    @app.get("/testcases")
    def testcases(source_id: str | None = None, source: str | None = None):
        records = list_testcases(state.catalog.root, source_id or source)
        return {
            "testcases": [
                {
                    "id": r.id,
                    "source": r.source,
                    "question": r.question,
                    "query": r.query,
                    "created_at": r.created_at,
                }
                for r in records
            ]
        }

    @app.post("/testcases/{testcase_id}/replay")
    def replay(testcase_id: str):
        record = load_testcase(state.catalog.root, testcase_id)
        source = state.catalog.get_record(record.source)
        connection = open_connection(source.connection, read_only=True)
        try:
            outcome = replay_testcase(record, connection)
        finally:
            connection.close()
        return {
            "testcase_id": outcome.testcase_id,
            "passed": outcome.passed,
            "diffs": outcome.diffs,
        }

    @app.get("/search")
    @app.get("/ontologies/{source_id}/search")
    def search(source_id: str, q: str, k: int = 5, kind: str | None = None):
        resolved = state.catalog.resolve(source_id)
        index = state.catalog.load_version_index(resolved.entry, state.embedder)
        if index is None:
            index = build_index(
                resolved.ontology, state.embedder, source_id=resolved.record.id
            )
        hits = knn_search(index, q, k, kind=kind)
        return {
            "hits": [
                {"entity_id": h.entity_id, "kind": h.kind, "similarity": h.similarity}
                for h in hits
            ]
        }

    return app
