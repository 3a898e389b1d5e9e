"""Command line entry points.

Exit codes: 0 success, 2 syntax or input errors, 3 generation exhausted,
4 name not found or already taken, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bootstrap import materialize_ddl, setup_source
from .charts import generate_chart
from .catalog import Catalog
from .config import AppConfig, build_embedder, build_provider, load_config
from .errors import (
    AutobirError,
    ConfigError,
    DdlSyntaxError,
    DuplicateNameError,
    NotFoundError,
)
from .executor import execute_query
from .ontology import serialize_bindings, serialize_ontology
from .physical import open_connection
from .pipeline import Conversation, GenerationDeps, explain_query, generate_query
from .provider import load_script
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

EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_SYNTAX = 2
EXIT_EXHAUSTED = 3
EXIT_NAME = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autobir",
        description="Natural language to SQL over an ontology-backed catalog.",
    )
    parser.add_argument("--config", help="path to a JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_setup = sub.add_parser("setup", help="register a data source and derive its ontology")
    p_setup.add_argument("--name", required=True)
    src_group = p_setup.add_mutually_exclusive_group(required=True)
    src_group.add_argument("--connection", help="engine descriptor, file:<path>")
    src_group.add_argument("--ddl", help="DDL file to materialize into a fresh database")
    p_setup.add_argument("--tenant")
    p_setup.add_argument("--collection", default="default")
    p_setup.add_argument(
        "--annotations", help="JSON file of {entity id: {key: text}} descriptions"
    )
    p_setup.add_argument("--policies", help="policy file applied before publishing")
    p_setup.add_argument(
        "--index-properties", action="store_true",
        help="index properties individually as well as classes",
    )
    p_setup.add_argument(
        "--new-version", action="store_true",
        help="publish another version for an already registered name",
    )

    p_ask = sub.add_parser("ask", help="turn a question into a validated query")
    p_ask.add_argument("--source", required=True, help="source id or name")
    p_ask.add_argument("--question", required=True)
    p_ask.add_argument("--script", help="JSON array of canned provider responses")
    p_ask.add_argument(
        "--explain", nargs="?", const="Simple", default=None, metavar="STYLE",
        choices=["Compact", "Verbose", "Formal", "Simple", "Precise"],
        help="also ask for an explanation, optionally naming a style",
    )
    run_group = p_ask.add_mutually_exclusive_group()
    run_group.add_argument(
        "--execute", action="store_true",
        help="run the accepted query (the default)",
    )
    run_group.add_argument("--no-execute", action="store_true", help="skip running the query")
    p_ask.add_argument(
        "--visualize", action="store_true",
        help="also ask for a chart over the execution result",
    )
    p_ask.add_argument("--archive", action="store_true", help="archive the interaction")
    p_ask.add_argument("--limit", type=int, default=100)
    p_ask.add_argument("--offset", type=int, default=0)

    p_search = sub.add_parser("search", help="semantic search over ontology entities")
    p_search.add_argument("--source", required=True)
    p_search.add_argument("--query", required=True)
    p_search.add_argument("--k", type=int, default=5)
    p_search.add_argument("--kind", choices=["class", "property"])

    p_replay = sub.add_parser("replay", help="re-run archived test cases")
    p_replay.add_argument("testcase", nargs="?", help="a single test case id")
    p_replay.add_argument("--all", action="store_true", help="replay every archived case")
    p_replay.add_argument("--source", help="limit --all to one source id")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host")
    p_serve.add_argument("--port", type=int)

    return parser


def _resolve_source(catalog: Catalog, ref: str, tenant: str):
    try:
        return catalog.get_record(ref)
    except NotFoundError:
        return catalog.find_record(ref, tenant)


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_setup(args, config: AppConfig) -> int:
    annotations = None
    if args.annotations:
        annotations = json.loads(Path(args.annotations).read_text(encoding="utf-8"))
    policy_text = None
    if args.policies:
        policy_text = Path(args.policies).read_text(encoding="utf-8")
    catalog = Catalog(config.catalog_root)
    embedder = build_embedder(config.embedder)
    connection = args.connection
    if connection is None:
        ddl_text = Path(args.ddl).read_text(encoding="utf-8")
        connection = materialize_ddl(ddl_text, catalog.root / "uploads")
    record, entry = setup_source(
        catalog,
        embedder,
        name=args.name,
        connection=connection,
        tenant=args.tenant or config.tenant,
        collection=args.collection,
        annotations=annotations,
        policy_text=policy_text,
        index_properties=args.index_properties,
        new_version=args.new_version,
    )
    _emit({"id": record.id, "name": record.name, "version": entry.version})
    return EXIT_OK


def _cmd_ask(args, config: AppConfig) -> int:
    catalog = Catalog(config.catalog_root)
    embedder = build_embedder(config.embedder)
    provider = load_script(args.script) if args.script else build_provider(config.provider)
    record = _resolve_source(catalog, args.source, config.tenant)
    resolved = catalog.resolve(record.id)
    connection = open_connection(record.connection, read_only=True)
    index = catalog.load_version_index(resolved.entry, embedder)
    if index is None:
        index = build_index(resolved.ontology, embedder, source_id=record.id)
    gen = config.generation
    deps = GenerationDeps(
        provider=provider,
        index=index,
        ontology=resolved.ontology,
        bindings=resolved.bindings,
        connection=connection,
        budget=SubOntologyBudget(
            max_classes=gen.max_classes,
            max_path_len=gen.max_path_len,
            seed_k=gen.seed_k,
            min_similarity=gen.min_similarity,
        ),
        max_iterations=gen.max_iterations,
    )
    conversation = Conversation("cli", gen.history_limit)
    result = generate_query(args.question, conversation, deps)
    payload = {
        "status": result.status,
        "query": result.query,
        "sub_ontology": list(result.sub_ontology.classes),
        "attempts": trail_from_attempts(result.attempts),
    }
    explanation = ""
    execution = None
    chart = None
    if result.accepted:
        if args.explain:
            sub_text = serialize_ontology(
                resolved.ontology, only=set(result.sub_ontology.classes)
            )
            explanation = explain_query(
                args.question, result.query, sub_text, provider, style=args.explain
            )
            payload["explanation"] = explanation
        if not args.no_execute:
            execution = execute_query(
                connection, result.query, limit=args.limit, offset=args.offset
            )
            payload["result"] = {
                "columns": list(execution.columns),
                "column_types": list(execution.column_types),
                "rows": [list(r) for r in execution.rows],
                "total_rows": execution.total_rows,
            }
        if args.visualize:
            if execution is None:
                raise AutobirError("cannot visualize without executing the query")
            chart = generate_chart(args.question, execution, provider)
            payload["chart"] = chart.to_dict()
        if args.archive and execution is not None:
            classes = set(result.sub_ontology.classes)
            testcase = build_testcase(
                source=record.id,
                question=args.question,
                query=result.query,
                explanation=explanation,
                result=execution,
                sub_ontology_text=serialize_ontology(resolved.ontology, only=classes),
                bindings_text=serialize_bindings(resolved.bindings, only=classes),
                attempts=result.attempts,
                chart_spec=chart.to_dict() if chart else None,
            )
            archive_testcase(catalog.root, testcase)
            payload["testcase_id"] = testcase.id
    _emit(payload)
    return EXIT_OK if result.accepted else EXIT_EXHAUSTED


def _cmd_search(args, config: AppConfig) -> int:
    catalog = Catalog(config.catalog_root)
    embedder = build_embedder(config.embedder)
    record = _resolve_source(catalog, args.source, config.tenant)
    resolved = catalog.resolve(record.id)
    index = catalog.load_version_index(resolved.entry, embedder)
    if index is None:
        index = build_index(resolved.ontology, embedder, source_id=record.id)
    hits = knn_search(index, args.query, args.k, kind=args.kind)
    _emit(
        {
            "hits": [
                {"entity_id": h.entity_id, "kind": h.kind, "similarity": h.similarity}
                for h in hits
            ]
        }
    )
    return EXIT_OK


def _cmd_replay(args, config: AppConfig) -> int:
    catalog = Catalog(config.catalog_root)
    if not args.testcase and not args.all:
        print("replay needs a test case id or --all", file=sys.stderr)
        return EXIT_SYNTAX
    if args.testcase:
        records = [load_testcase(catalog.root, args.testcase)]
    else:
        records = list_testcases(catalog.root, args.source)
    all_passed = True
    for record in records:
        source = catalog.get_record(record.source)
        connection = open_connection(source.connection, read_only=True)
        try:
            outcome = replay_testcase(record, connection)
        finally:
            connection.close()
        if outcome.passed:
            print(f"PASS {record.id}")
        else:
            all_passed = False
            print(f"FAIL {record.id}: " + "; ".join(outcome.diffs))
    return EXIT_OK if all_passed else EXIT_GENERIC


def _cmd_serve(args, config: AppConfig) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(config)
    uvicorn.run(
        app,
        host=args.host or config.service.host,
        port=args.port or config.service.port,
        log_level="info",
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "setup":
            return _cmd_setup(args, config)
        if args.command == "ask":
            return _cmd_ask(args, config)
        if args.command == "search":
            return _cmd_search(args, config)
        if args.command == "replay":
            return _cmd_replay(args, config)
        return _cmd_serve(args, config)
    except (DdlSyntaxError, SqlSyntaxError, ConfigError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except (NotFoundError, DuplicateNameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NAME
    except AutobirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERIC


if __name__ == "__main__":
    sys.exit(main())
