"""autobir: business questions in, validated SQL out.

The pipeline derives an ontology from a physical schema, selects the slice
of it relevant to a question, prompts a text provider with the grounded
schema, and validates the result through a checker battery with bounded
self-repair. Accepted interactions can be archived and replayed.
"""

from .catalog import Catalog, DataSourceRecord, ResolvedSource, VersionEntry
from .charts import ChartSpec, generate_chart, validate_chart
from .checkers import CheckerReport, check_execution, check_semantics, check_syntax, repair_instruction, run_battery
from .embedding import DeterministicHashEmbedder, RemoteEmbedder, split_words
from .errors import AutobirError, Diagnostic
from .executor import ResultSet, execute_query
from .ontology import (
    BindingSet,
    GroundedSchema,
    Ontology,
    OntologyClass,
    annotate,
    derive_ontology,
    deserialize_bindings,
    deserialize_ontology,
    ground,
    render_create_tables,
    serialize_bindings,
    serialize_ontology,
)
from .physical import PhysicalModel, introspect, open_connection, parse_ddl, serialize_ddl
from .pipeline import (
    Conversation,
    GenerationDeps,
    GenerationResult,
    assemble_prompt,
    explain_query,
    extract_sql,
    generate_query,
)
from .policies import apply_policies, apply_policy, parse_policy_file
from .provider import HttpProvider, LLMProvider, ScriptedProvider, load_script
from .search import (
    SemanticIndex,
    SubOntology,
    SubOntologyBudget,
    build_index,
    extract_terms,
    knn_search,
    load_index,
    save_index,
    select_sub_ontology,
)
from .sql import SqlSyntaxError, parse_select
from .testcases import (
    TestCaseRecord,
    archive_testcase,
    build_testcase,
    load_testcase,
    replay_testcase,
)

__version__ = "0.1.0"
