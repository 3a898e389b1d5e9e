"""Semantic index over ontology entities and sub-ontology selection.

Entities are rendered to short texts (label, selected annotations, property
names), embedded, and scanned exhaustively at query time; at the scale this
package targets the exact scan is both the oracle and the implementation.
Question terms seed classes whose neighborhoods are expanded along
shortest object-property paths until a budget boundary is reached.
"""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyIndexError, NoSeedError, UnknownEntityError
from .ontology import Ontology

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RenderConfig:
    include_properties: bool = True
    annotation_keys: tuple[str, ...] = ("description",)


@dataclass(frozen=True)
class EntityRendering:
    entity_id: str
    kind: str  # "class" | "property"
    text: str


def render_entity(onto: Ontology, entity_id: str, config: RenderConfig) -> EntityRendering:
    """Join label, selected annotations, and (for classes) property names
    with "; " in a fixed order. Never empty for a valid entity."""
    if "." in entity_id:
        cid, _, prop = entity_id.partition(".")
        cls = onto.get_class(cid)
        if cls is None or prop not in cls.property_names():
            raise UnknownEntityError(f"unknown entity {entity_id}", entity=entity_id)
        parts = [prop]
        notes = onto.annotations.get(entity_id, {})
        parts.extend(notes[key] for key in config.annotation_keys if key in notes)
        return EntityRendering(entity_id, "property", "; ".join(parts))
    cls = onto.get_class(entity_id)
    if cls is None:
        raise UnknownEntityError(f"unknown entity {entity_id}", entity=entity_id)
    parts = [cls.label]
    notes = onto.annotations.get(entity_id, {})
    parts.extend(notes[key] for key in config.annotation_keys if key in notes)
    if config.include_properties:
        parts.extend(cls.property_names())
    return EntityRendering(entity_id, "class", "; ".join(parts))


@dataclass(frozen=True)
class IndexEntry:
    entity_id: str
    kind: str
    text: str
    source_id: str
    vector: np.ndarray


@dataclass
class SemanticIndex:
    embedder: object  # anything with .embed/.embed_batch and .embedder_id
    source_id: str = ""
    entries: list[IndexEntry] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return getattr(self.embedder, "dimension", 0)


@dataclass(frozen=True)
class IndexConfig:
    render: RenderConfig = RenderConfig()
    index_properties: bool = False


def build_index(
    onto: Ontology,
    embedder,
    source_id: str = "",
    config: IndexConfig = IndexConfig(),
) -> SemanticIndex:
    """One entry per class, plus one per property when configured."""
    entity_ids: list[str] = []
    for cls in onto.classes:
        entity_ids.append(cls.id)
        if config.index_properties:
            entity_ids.extend(f"{cls.id}.{p}" for p in cls.property_names())
    renderings = [render_entity(onto, eid, config.render) for eid in entity_ids]
    vectors = embedder.embed_batch([r.text for r in renderings])
    entries = [
        IndexEntry(r.entity_id, r.kind, r.text, source_id, v)
        for r, v in zip(renderings, vectors)
    ]
    return SemanticIndex(embedder, source_id, entries)


@dataclass(frozen=True)
class SearchHit:
    entity_id: str
    kind: str
    similarity: float


def knn_search(
    index: SemanticIndex, query: str, k: int, kind: str | None = None
) -> list[SearchHit]:
    """Top-k entries by cosine similarity; exhaustive scan, ties broken by
    ascending entity id. Returns exactly min(k, matching entries) hits."""
    if not index.entries:
        raise EmptyIndexError("search over an empty index")
    candidates = [e for e in index.entries if kind is None or e.kind == kind]
    query_vec = index.embedder.embed(query)
    scored = [
        (float(np.dot(e.vector, query_vec)), e.entity_id, e.kind) for e in candidates
    ]
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [SearchHit(eid, ekind, sim) for sim, eid, ekind in scored[: max(k, 0)]]


# --- persistence ------------------------------------------------------------------


def save_index(index: SemanticIndex, path: Path) -> None:
    """Write header line then one entry per line; byte-stable for a fixed
    embedder and ontology."""
    lines = [
        json.dumps(
            {
                "embedder_id": index.embedder.embedder_id,
                "dimension": index.dimension,
                "count": len(index.entries),
                "source_id": index.source_id,
            },
            separators=(",", ":"),
        )
    ]
    for entry in index.entries:
        lines.append(
            json.dumps(
                {
                    "entity_id": entry.entity_id,
                    "kind": entry.kind,
                    "text": entry.text,
                    "source_id": entry.source_id,
                    "vector": list(entry.vector),
                },
                separators=(",", ":"),
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_index(path: Path, embedder) -> SemanticIndex:
    """Load a saved index; the embedder must match the recorded id."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty index file")
    header = json.loads(lines[0])
    if header.get("embedder_id") != embedder.embedder_id:
        raise ValueError(
            f"index built with {header.get('embedder_id')}, "
            f"loaded with {embedder.embedder_id}"
        )
    entries = []
    for line in lines[1 : header["count"] + 1]:
        raw = json.loads(line)
        entries.append(
            IndexEntry(
                raw["entity_id"],
                raw["kind"],
                raw["text"],
                raw.get("source_id", ""),
                np.asarray(raw["vector"], dtype=np.float64),
            )
        )
    if len(entries) != header["count"]:
        raise ValueError("index entry count does not match header")
    return SemanticIndex(embedder, header.get("source_id", ""), entries)


# --- question terms ----------------------------------------------------------------

STOPWORDS = frozenset(
    """a an and are as at be been but by can could did do does for from had has
    have he her hers him his how i if in into is it its me my not of on or our
    ours out over per please she so some such that the their theirs them then
    there these they this those to under up us was we were what when where which
    while who whom why will with would you your yours""".split()
)


def extract_terms(question: str) -> list[str]:
    """Unigrams then bigrams over the stopword-filtered token stream.

    Tokens are lower-cased with punctuation stripped; duplicates are dropped
    keeping first appearance. Bigrams join tokens that remain adjacent after
    stopword removal; any bigram containing a stopword is discarded.
    """
    raw = [t.lower() for t in _tokenize_question(question)]
    kept = [t for t in raw if t and t not in STOPWORDS]
    unigrams: list[str] = []
    for tok in kept:
        if tok not in unigrams:
            unigrams.append(tok)
    bigrams: list[str] = []
    for a, b in zip(kept, kept[1:]):
        gram = f"{a} {b}"
        if a in STOPWORDS or b in STOPWORDS:
            continue
        if gram not in bigrams:
            bigrams.append(gram)
    return unigrams + bigrams


def _tokenize_question(question: str) -> list[str]:
    out, buf = [], []
    for ch in question:
        if ch.isalnum() or ch == "_":
            buf.append(ch)
        else:
            if buf:
                out.append("".join(buf))
                buf = []
    if buf:
        out.append("".join(buf))
    return out


# --- sub-ontology selection ----------------------------------------------------------


@dataclass(frozen=True)
class SubOntologyBudget:
    max_classes: int = 12
    max_path_len: int = 4
    seed_k: int = 3
    min_similarity: float = 0.15


@dataclass(frozen=True)
class SubOntology:
    classes: tuple[str, ...]
    seed_classes: tuple[str, ...]
    included_paths: tuple[tuple[str, ...], ...]
    scores: dict[str, float]


def _adjacency(onto: Ontology) -> dict[str, list[str]]:
    adj: dict[str, set[str]] = {c.id: set() for c in onto.classes}
    for src, target, _name in onto.edges():
        if src == target:
            continue
        adj[src].add(target)
        adj.setdefault(target, set()).add(src)
    return {k: sorted(v) for k, v in adj.items()}


def shortest_path(adj: dict[str, list[str]], start: str, goal: str) -> list[str] | None:
    """BFS shortest path visiting neighbors in sorted order; deterministic."""
    if start == goal:
        return [start]
    parents: dict[str, str] = {start: start}
    queue: deque[str] = deque([start])
    while queue:
        node = queue.popleft()
        for neighbor in adj.get(node, ()):
            if neighbor in parents:
                continue
            parents[neighbor] = node
            if neighbor == goal:
                path = [goal]
                while path[-1] != start:
                    path.append(parents[path[-1]])
                return path[::-1]
            queue.append(neighbor)
    return None


def _owning_class(entity_id: str) -> str:
    return entity_id.partition(".")[0]


def select_sub_ontology(
    index: SemanticIndex,
    onto: Ontology,
    question: str,
    budget: SubOntologyBudget = SubOntologyBudget(),
) -> SubOntology:
    """Seed classes from question terms, then expand along shortest paths.

    Seeds are the per-term top ``seed_k`` classes at or above the similarity
    threshold (property hits promote their owning class). Seed pairs are
    processed in descending order of min(seed similarity), ties by pair id;
    each contributes its shortest connecting path. Expansion stops at the
    first pair whose path would exceed max_path_len or push the class count
    past max_classes, so enlarging either budget only ever adds classes.
    """
    terms = extract_terms(question)
    if not terms:
        raise NoSeedError(f"no searchable terms in question {question!r}")
    scores: dict[str, float] = {}
    for term in terms:
        hits = knn_search(index, term, k=len(index.entries))
        ranked: list[tuple[str, float]] = []
        seen: set[str] = set()
        for hit in hits:
            cid = _owning_class(hit.entity_id)
            if onto.get_class(cid) is None or cid in seen:
                continue
            seen.add(cid)
            ranked.append((cid, hit.similarity))
        for cid, sim in ranked[: budget.seed_k]:
            if sim >= budget.min_similarity:
                scores[cid] = max(scores.get(cid, 0.0), sim)
    if not scores:
        raise NoSeedError(
            f"no term cleared the similarity threshold {budget.min_similarity}"
        )

    seeds = sorted(scores, key=lambda c: (-scores[c], c))[: budget.max_classes]
    classes: set[str] = set(seeds)
    included_paths: list[tuple[str, ...]] = []
    adj = _adjacency(onto)

    pairs = []
    for i, a in enumerate(sorted(seeds)):
        for b in sorted(seeds)[i + 1 :]:
            pairs.append((min(scores[a], scores[b]), (a, b)))
    pairs.sort(key=lambda item: (-item[0], item[1]))

    for _score, (a, b) in pairs:
        path = shortest_path(adj, a, b)
        if path is None:
            continue  # disconnected in the ontology graph; not a budget matter
        if len(path) - 1 > budget.max_path_len:
            break  # boundary reached
        if len(classes | set(path)) > budget.max_classes:
            break  # boundary reached
        classes.update(path)
        included_paths.append(tuple(path))

    return SubOntology(
        classes=tuple(sorted(classes)),
        seed_classes=tuple(sorted(seeds)),
        included_paths=tuple(included_paths),
        scores={c: scores[c] for c in sorted(scores) if c in classes},
    )
