"""Question-to-query pipeline.

assemble_prompt builds the full generation prompt from fixed sections in a
fixed order, so identical inputs produce byte-identical prompts. The
generation loop selects a sub-ontology once per question, then alternates
provider calls with the checker battery until a query passes or the
iteration budget runs out. Repair notes replace each other between rounds;
only the latest failure is shown to the model.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .checkers import CheckerReport, repair_instruction, run_battery
from .ontology import BindingSet, GroundedSchema, Ontology, ground, render_create_tables
from .provider import LLMProvider
from .search import (
    SemanticIndex,
    SubOntology,
    SubOntologyBudget,
    extract_terms,
    select_sub_ontology,
)

TASK_LINE = (
    "Task: Given a data schema, and a free-text question,"
    " produce an SQL query that matches it."
)

SCHEMA_HEADER = "Your query must refer to the following schemas:"
HISTORY_HEADER = "Conversation so far:"

_FENCE_RE = re.compile(r"```(?:sql)?\s*\n(.*?)```", re.DOTALL | re.IGNORECASE)


@dataclass(frozen=True)
class PromptConfig:
    guidelines: tuple[str, ...] = (
        "Only generate queries with the provided tables.",
        "Answer with the SQL query after the marker 'Query:'.",
    )
    few_shot: tuple[tuple[str, str], ...] = ()


class Conversation:
    """Bounded message history; oldest messages fall off first."""

    def __init__(self, conversation_id: str, history_limit: int = 10) -> None:
        self.id = conversation_id
        self.history: deque[tuple[str, str]] = deque(maxlen=history_limit)

    def record(self, role: str, text: str) -> None:
        if role not in ("user", "system"):
            raise ValueError(f"unknown role {role!r}")
        self.history.append((role, text))

    def render_lines(self) -> list[str]:
        return [
            ("User: " if role == "user" else "System: ") + text
            for role, text in self.history
        ]


def assemble_prompt(
    question: str,
    schema_sql: str,
    history_lines: list[str] | None = None,
    repair_notes: str | None = None,
    config: PromptConfig = PromptConfig(),
) -> str:
    """Join the prompt sections; empty sections are left out entirely."""
    sections = []
    task = [TASK_LINE] + [f"- Guideline: {g}" for g in config.guidelines]
    sections.append("\n".join(task))
    for shot_question, shot_query in config.few_shot:
        sections.append(f"Question: {shot_question}\nQuery: {shot_query}")
    if schema_sql:
        sections.append(f"{SCHEMA_HEADER}\n{schema_sql}")
    if history_lines:
        sections.append("\n".join([HISTORY_HEADER] + list(history_lines)))
    sections.append(f"Question: {question}")
    if repair_notes:
        sections.append(repair_notes)
    return "\n\n".join(sections)


def extract_sql(response: str) -> str:
    """Pull the query out of a model response.

    Preference order: first fenced code block, then text after a 'Query:'
    marker, then the whole response.
    """
    match = _FENCE_RE.search(response)
    if match:
        return match.group(1).strip()
    marker = response.find("Query:")
    if marker >= 0:
        return response[marker + len("Query:"):].strip()
    return response.strip()


@dataclass
class Attempt:
    prompt: str
    query: str
    reports: list[CheckerReport]

    @property
    def accepted(self) -> bool:
        return all(r.ok for r in self.reports)


@dataclass
class GenerationResult:
    status: str  # Accepted | Exhausted
    query: str | None
    attempts: list[Attempt]
    sub_ontology: SubOntology
    grounded: GroundedSchema
    schema_sql: str
    terms: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.status == "Accepted"


@dataclass
class GenerationDeps:
    """Everything generate_query needs, bundled for easy threading."""

    provider: LLMProvider
    index: SemanticIndex
    ontology: Ontology
    bindings: BindingSet
    connection: object | None = None
    budget: SubOntologyBudget = SubOntologyBudget()
    prompt: PromptConfig = PromptConfig()
    max_iterations: int = 3


def generate_query(
    question: str, conversation: Conversation, deps: GenerationDeps
) -> GenerationResult:
    terms = extract_terms(question)
    sub = select_sub_ontology(deps.index, deps.ontology, question, deps.budget)
    grounded = ground(sub.classes, deps.bindings)
    schema_sql = render_create_tables(grounded)
    history_lines = conversation.render_lines()

    attempts: list[Attempt] = []
    repair_notes: str | None = None
    for _ in range(deps.max_iterations):
        prompt = assemble_prompt(
            question, schema_sql, history_lines, repair_notes, deps.prompt
        )
        response = deps.provider.complete(prompt)
        query = extract_sql(response)
        reports = run_battery(query, grounded, deps.connection)
        attempts.append(Attempt(prompt, query, reports))
        if attempts[-1].accepted:
            conversation.record("user", question)
            conversation.record("system", query)
            return GenerationResult(
                "Accepted", query, attempts, sub, grounded, schema_sql, terms
            )
        repair_notes = repair_instruction(reports)

    # question still enters history so follow-ups can reference it
    conversation.record("user", question)
    return GenerationResult(
        "Exhausted", None, attempts, sub, grounded, schema_sql, terms
    )


EXPLANATION_STYLES = ("Compact", "Verbose", "Formal", "Simple", "Precise")

EXPLAIN_CONTEXT_HEADER = "The query was generated over the following model:"


def explain_query(
    question: str,
    sql: str,
    sub_rendering: str,
    provider: LLMProvider,
    style: str = "Simple",
) -> str:
    """Ask the provider for a non-expert explanation in the given style.

    sub_rendering is the serialized sub-ontology the query was grounded in;
    it goes into the prompt as context alongside the original question.
    """
    if style not in EXPLANATION_STYLES:
        raise ValueError(
            f"unknown explanation style {style!r},"
            f" expected one of {', '.join(EXPLANATION_STYLES)}"
        )
    sections = [
        "Task: Explain the following SQL query to a non-expert,"
        f" in a {style} style."
    ]
    if sub_rendering:
        sections.append(f"{EXPLAIN_CONTEXT_HEADER}\n{sub_rendering}")
    sections.append(f"Question: {question}")
    sections.append(f"Query: {sql}")
    return provider.complete("\n\n".join(sections)).strip()
