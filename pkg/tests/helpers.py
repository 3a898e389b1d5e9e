"""Shared fixtures-as-code for the test suite.

The canonical question and query come from the bundled demo dataset; the
earnings oracle recomputes the expected aggregate directly from the row
data so tests never trust the engine under test.
"""

from __future__ import annotations

from autobir.embedding import DeterministicHashEmbedder
from autobir.ontology import annotate, derive_ontology
from autobir.pipeline import Conversation, GenerationDeps
from autobir.physical import open_connection, parse_ddl
from autobir.provider import ScriptedProvider
from autobir.sampledata import ANNOTATIONS, DEMO_DDL, ROWS, build_demo_db
from autobir.search import build_index

EURO_QUESTION = "Please provide the total amount of earnings per product sold in Euro"

# the canonical accepted answer for EURO_QUESTION
EURO_QUERY = (
    'SELECT Product.ProductNumber, '
    'SUM(SalesOrderDetail.LineTotal*CurrencyRate.AverageRate) AS TotalEarnings\n'
    'FROM Product\n'
    'JOIN SalesOrderDetail ON SalesOrderDetail.ProductID = Product.ProductID\n'
    'JOIN SalesOrderHeader ON SalesOrderDetail.SalesOrderID = SalesOrderHeader.SalesOrderID\n'
    'JOIN CurrencyRate ON SalesOrderHeader.CurrencyRateID = CurrencyRate.CurrencyRateID\n'
    'WHERE CurrencyRate.ToCurrencyCode = "Euro"\n'
    'GROUP BY Product.ProductNumber'
)

HELMET_QUESTION = "How many helmets do we have in stock?"

BAD_TABLE_QUERY = (
    "SELECT FirstName, LastName, Shift\n"
    "FROM BadTableName\n"
    "WHERE Department = 'Quality Assurance'"
)


# schema-cleanup fixture: a helper table begging to be folded away, plus a
# transliterated column name in need of a rename
FILE_DDL = (
    "CREATE TABLE FileProperties (\n"
    "  PropsID INT,\n"
    "  saptaah_ka_din VARCHAR,\n"
    "  SizeKb INT,\n"
    "  PRIMARY KEY (PropsID)\n"
    ");\n"
    "CREATE TABLE File (\n"
    "  FileID INT,\n"
    "  Name VARCHAR,\n"
    "  PropsID INT,\n"
    "  PRIMARY KEY (FileID),\n"
    "  FOREIGN KEY (PropsID) REFERENCES FileProperties(PropsID)\n"
    ");\n"
)

FILE_POLICIES = (
    "name: drop-properties-suffix\n"
    "condition: suffix-match(Properties)\n"
    "action: collapse_to_referencing\n"
    "---\n"
    "name: hindi-day-rename\n"
    "condition: rename-map(saptaah_ka_din=day_of_the_week)\n"
    "action: rename_property\n"
)


def euro_earnings_oracle() -> dict[str, float]:
    """Brute-force per-ProductNumber Euro earnings from the fixture rows."""
    rate = {r[0]: (r[1], r[2]) for r in ROWS["CurrencyRate"]}
    header_rate = {h[0]: h[2] for h in ROWS["SalesOrderHeader"]}
    number = {p[0]: p[2] for p in ROWS["Product"]}
    totals: dict[str, float] = {}
    for _, order_id, product_id, _, _, line_total in ROWS["SalesOrderDetail"]:
        avg_rate, currency = rate[header_rate[order_id]]
        if currency != "Euro":
            continue
        key = number[product_id]
        totals[key] = totals.get(key, 0.0) + line_total * avg_rate
    return totals


def fk_count_oracle(ddl: str = DEMO_DDL) -> int:
    """FK count read straight off the DDL text, independent of the parser."""
    return ddl.count("FOREIGN KEY")


def annotated_demo_ontology():
    model = parse_ddl(DEMO_DDL)
    onto, bind = derive_ontology(model)
    for entity_id, pairs in ANNOTATIONS.items():
        for key, text in pairs.items():
            onto = annotate(onto, entity_id, key, text)
    return model, onto, bind


def make_deps(tmp_path, responses, **overrides) -> tuple[GenerationDeps, Conversation, ScriptedProvider]:
    """A ready-to-run pipeline over the demo db with a scripted provider."""
    db = tmp_path / "demo.db"
    if not db.exists():
        build_demo_db(db)
    _, onto, bind = annotated_demo_ontology()
    embedder = DeterministicHashEmbedder()
    index = build_index(onto, embedder, source_id="demo")
    connection = open_connection(f"file:{db}", read_only=True)
    provider = ScriptedProvider(list(responses))
    deps = GenerationDeps(
        provider=provider,
        index=index,
        ontology=onto,
        bindings=bind,
        connection=connection,
        **overrides,
    )
    return deps, Conversation("test"), provider


OFFER_PRODUCT_BLOCK = (
    "@Class@ specialofferproduct {\n"
    "    @Data Property@: rowguid VARCHAR,\n"
    "    @Data Property@: ModifiedDate VARCHAR,\n"
    "    @Data Property@: SpecialOfferID INT,\n"
    "    @Data Property@: ProductID INT,\n"
    "    @Object Property@: has_product REFERENCES product\n"
    "}\n"
)

OFFER_PRODUCT_BINDINGS = (
    "@Class@ c: specialofferproduct => @Table@ t: specialofferproduct, "
    "@Table@ t2: Product\n"
    "    c.rowguid => t.rowguid,\n"
    "    c.ModifiedDate => t.ModifiedDate,\n"
    "    c.SpecialOfferID => t.SpecialOfferID,\n"
    "    c.ProductID => t.ProductID,\n"
    "    c.has_product => t2.Product ON t.ProductID = t2.ProductID\n"
)

BAD_TABLE_REPORT = (
    "Status: 'Invalid'\n"
    "Checker Type: 'Semantic'\n"
    "Error message: 'Table BadTableName does not exist'"
)

BAD_TABLE_REPAIR = (
    "Generated query may be invalid because:\n"
    "- Table BadTableName does not exist.\n"
    "Only generate queries with the provided tables."
)
