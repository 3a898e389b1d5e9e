"""Walk the whole pipeline over the bundled dataset, fully offline.

Derives the ontology from the demo schema, asks the canonical earnings
question with a scripted provider whose first draft is deliberately broken,
prints the repair trail, executes the accepted query, proposes a chart,
archives the interaction, and replays it.

Run from the repository root:

    python3 scripts/demo_flow.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from autobir.charts import generate_chart
from autobir.embedding import DeterministicHashEmbedder
from autobir.executor import execute_query
from autobir.ontology import (
    annotate,
    derive_ontology,
    serialize_bindings,
    serialize_ontology,
)
from autobir.physical import open_connection
from autobir.pipeline import Conversation, GenerationDeps, generate_query
from autobir.provider import ScriptedProvider
from autobir.sampledata import ANNOTATIONS, build_demo_db, demo_model
from autobir.search import build_index
from autobir.testcases import (
    archive_testcase,
    build_testcase,
    load_testcase,
    replay_testcase,
)

QUESTION = "Please provide the total amount of earnings per product sold in Euro"

BROKEN_DRAFT = (
    "Query: SELECT FirstName, LastName, Shift\n"
    "FROM BadTableName\n"
    "WHERE Department = 'Quality Assurance'"
)

GOOD_DRAFT = (
    "Query: "
    'SELECT Product.ProductNumber, '
    'SUM(SalesOrderDetail.LineTotal*CurrencyRate.AverageRate) AS TotalEarnings\n'
    "FROM Product\n"
    "JOIN SalesOrderDetail ON SalesOrderDetail.ProductID = Product.ProductID\n"
    "JOIN SalesOrderHeader ON SalesOrderDetail.SalesOrderID = SalesOrderHeader.SalesOrderID\n"
    "JOIN CurrencyRate ON SalesOrderHeader.CurrencyRateID = CurrencyRate.CurrencyRateID\n"
    'WHERE CurrencyRate.ToCurrencyCode = "Euro"\n'
    "GROUP BY Product.ProductNumber"
)

CHART_DRAFT = json.dumps({
    "kind": "bar",
    "x": "ProductNumber",
    "y": "TotalEarnings",
    "series": None,
    "title": "Earnings per product in Euro",
})


def banner(title: str) -> None:
    print()
    print("=" * 62)
    print(title)
    print("=" * 62)


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="autobir-demo-"))
    db_path = workdir / "demo.db"
    build_demo_db(str(db_path))
    print(f"demo database written to {db_path}")

    banner("1. ontology derived from the physical schema")
    model = demo_model()
    onto, bind = derive_ontology(model)
    for entity_id, pairs in ANNOTATIONS.items():
        for key, text in pairs.items():
            onto = annotate(onto, entity_id, key, text)
    print(serialize_ontology(onto))

    banner("2. question to validated query, with one repair round")
    embedder = DeterministicHashEmbedder()
    index = build_index(onto, embedder, source_id="demo")
    connection = open_connection(f"file:{db_path}", read_only=True)
    provider = ScriptedProvider([BROKEN_DRAFT, GOOD_DRAFT])
    deps = GenerationDeps(
        provider=provider,
        index=index,
        ontology=onto,
        bindings=bind,
        connection=connection,
    )
    convo = Conversation("demo")
    result = generate_query(QUESTION, convo, deps)
    print(f"question: {QUESTION}")
    print(f"status:   {result.status} after {len(result.attempts)} attempt(s)")
    for n, attempt in enumerate(result.attempts, start=1):
        print(f"\nattempt {n}:")
        for report in attempt.reports:
            print("  " + report.render().replace("\n", "\n  "))
    print("\naccepted query:\n" + result.query)

    banner("3. execution")
    execution = execute_query(connection, result.query)
    print(" | ".join(execution.columns))
    for row in execution.rows:
        print(" | ".join(str(v) for v in row))
    print(f"({execution.total_rows} rows)")

    banner("4. chart proposal")
    chart = generate_chart(QUESTION, execution, ScriptedProvider([CHART_DRAFT]))
    print(json.dumps(chart.to_dict(), indent=2))

    banner("5. archive and replay")
    classes = set(result.sub_ontology.classes)
    record = build_testcase(
        source="demo",
        question=QUESTION,
        query=result.query,
        explanation="Totals line earnings converted to Euro per product.",
        result=execution,
        sub_ontology_text=serialize_ontology(onto, only=classes),
        bindings_text=serialize_bindings(bind, only=classes),
        attempts=result.attempts,
        chart_spec=chart.to_dict(),
    )
    archive_testcase(workdir / "catalog", record)
    loaded = load_testcase(workdir / "catalog", record.id)
    outcome = replay_testcase(loaded, connection)
    verdict = "PASS" if outcome.passed else "FAIL: " + "; ".join(outcome.diffs)
    print(f"archived {record.id}, replay {verdict}")
    connection.close()


if __name__ == "__main__":
    main()
