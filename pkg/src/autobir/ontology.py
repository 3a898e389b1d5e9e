"""Ontology derivation from a physical model, serialization, and grounding.

Derivation is mechanical and total: one class per table (id is the lowered
table name, label keeps the declared case), one data property per column
(foreign-key columns included), and one ``has_<target>`` object property
per foreign key. A binding set produced alongside the ontology maps every
class and property back to the physical table or column it came from, so
refinement policies can reshape the ontology without losing queryability.

Serialized ontologies use the ``@Class@`` block format; bindings use the
``c.<prop> => t.<col>`` arrow format. Both are deterministic and round-trip
through their deserializers.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import DerivationError, UnboundEntityError, UnknownEntityError
from .physical import PhysicalModel, TableDef

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DataProperty:
    name: str
    sql_type: str


@dataclass(frozen=True)
class ObjectProperty:
    name: str
    target: str  # class id


@dataclass(frozen=True)
class OntologyClass:
    id: str
    label: str
    data_properties: tuple[DataProperty, ...] = ()
    object_properties: tuple[ObjectProperty, ...] = ()

    def data_property(self, name: str) -> DataProperty | None:
        for prop in self.data_properties:
            if prop.name.lower() == name.lower():
                return prop
        return None

    def property_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.data_properties) + tuple(
            p.name for p in self.object_properties
        )


@dataclass(frozen=True)
class Ontology:
    classes: tuple[OntologyClass, ...] = ()
    # entity id ("class" or "class.prop") -> annotation key -> text
    annotations: Mapping[str, Mapping[str, str]] = field(default_factory=dict)

    def get_class(self, class_id: str) -> OntologyClass | None:
        lowered = class_id.lower()
        for cls in self.classes:
            if cls.id == lowered:
                return cls
        return None

    def class_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.classes)

    def edges(self) -> tuple[tuple[str, str, str], ...]:
        """(source class, target class, property name) for every object property."""
        out = []
        for cls in self.classes:
            for prop in cls.object_properties:
                out.append((cls.id, prop.target, prop.name))
        return tuple(out)


def annotate(onto: Ontology, entity_id: str, key: str, text: str) -> Ontology:
    """Return a copy of the ontology with one annotation added or replaced."""
    merged = {eid: dict(kv) for eid, kv in onto.annotations.items()}
    merged.setdefault(entity_id, {})[key] = text
    return replace(onto, annotations=merged)


@dataclass(frozen=True)
class FkJoin:
    """Physical join realizing an object property: local columns against
    target-table columns, pairwise."""

    source_table: str
    local_columns: tuple[str, ...]
    target_table: str
    target_columns: tuple[str, ...]


@dataclass(frozen=True)
class BindingSet:
    model: PhysicalModel
    class_bindings: Mapping[str, str] = field(default_factory=dict)  # class -> table
    # (class, prop) -> (table, column); the table may differ from the class's
    # primary table after a collapse
    property_bindings: Mapping[tuple[str, str], tuple[str, str]] = field(default_factory=dict)
    object_bindings: Mapping[tuple[str, str], FkJoin] = field(default_factory=dict)

    def class_properties(self, class_id: str) -> list[str]:
        return [prop for (cid, prop) in self.property_bindings if cid == class_id]


# --- derivation ----------------------------------------------------------------


def derive_ontology(model: PhysicalModel) -> tuple[Ontology, BindingSet]:
    """Derive the base ontology and its binding set from a physical model."""
    classes: list[OntologyClass] = []
    class_bindings: dict[str, str] = {}
    property_bindings: dict[tuple[str, str], tuple[str, str]] = {}
    object_bindings: dict[tuple[str, str], FkJoin] = {}

    ids = {t.name.lower() for t in model.tables}
    if len(ids) != len(model.tables):
        raise DerivationError("table names collide after lowering")

    for table in model.tables:
        cid = table.name.lower()
        data_props = tuple(DataProperty(col.name, col.sql_type) for col in table.columns)
        obj_props: list[ObjectProperty] = []
        used_names = {p.name.lower() for p in data_props}
        for fk in table.foreign_keys:
            base = f"has_{fk.target_table.lower()}"
            name, n = base, 1
            while name.lower() in used_names:
                n += 1
                name = f"{base}_{n}"
            used_names.add(name.lower())
            obj_props.append(ObjectProperty(name, fk.target_table.lower()))
            object_bindings[(cid, name)] = FkJoin(
                table.name, fk.columns, fk.target_table, fk.target_columns
            )
        classes.append(OntologyClass(cid, table.name, data_props, tuple(obj_props)))
        class_bindings[cid] = table.name
        for col in table.columns:
            property_bindings[(cid, col.name)] = (table.name, col.name)

    onto = Ontology(tuple(classes), {})
    bind = BindingSet(model, class_bindings, property_bindings, object_bindings)
    return onto, bind


# --- ontology serialization ------------------------------------------------------


def serialize_ontology(onto: Ontology, only: set[str] | None = None) -> str:
    """Render classes (optionally a subset) in the block format, id order."""
    blocks = []
    for cls in sorted(onto.classes, key=lambda c: c.id):
        if only is not None and cls.id not in only:
            continue
        lines: list[str] = []
        if cls.label != cls.id:
            lines.append(f"@Annotation@: label = {json.dumps(cls.label)}")
        for key in sorted(onto.annotations.get(cls.id, {})):
            text = onto.annotations[cls.id][key]
            lines.append(f"@Annotation@: {key} = {json.dumps(text)}")
        for prop in cls.data_properties:
            for key in sorted(onto.annotations.get(f"{cls.id}.{prop.name}", {})):
                text = onto.annotations[f"{cls.id}.{prop.name}"][key]
                lines.append(f"@Annotation@: {prop.name}.{key} = {json.dumps(text)}")
            lines.append(f"@Data Property@: {prop.name} {prop.sql_type}")
        for prop in cls.object_properties:
            lines.append(f"@Object Property@: {prop.name} REFERENCES {prop.target}")
        body = ",\n".join(f"    {line}" for line in lines)
        blocks.append(f"@Class@ {cls.id} {{\n{body}\n}}")
    return "\n\n".join(blocks) + ("\n" if blocks else "")


_CLASS_RE = re.compile(r"^@Class@\s+(\S+)\s*\{$")
_LINE_RE = re.compile(r"^@(Annotation|Data Property|Object Property)@:\s*(.*?),?$")


def deserialize_ontology(text: str) -> Ontology:
    """Parse block-format text back into an Ontology. Raises ValueError."""
    classes: list[OntologyClass] = []
    annotations: dict[str, dict[str, str]] = {}
    current: dict | None = None
    for raw_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if current is None:
            m = _CLASS_RE.match(line)
            if not m:
                raise ValueError(f"line {raw_no}: expected @Class@ block header")
            current = {"id": m.group(1), "label": m.group(1), "data": [], "obj": []}
            continue
        if line == "}":
            classes.append(
                OntologyClass(
                    current["id"], current["label"],
                    tuple(current["data"]), tuple(current["obj"]),
                )
            )
            current = None
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise ValueError(f"line {raw_no}: unrecognized entry {line!r}")
        kind, rest = m.group(1), m.group(2).strip()
        if kind == "Annotation":
            key, _, value = rest.partition("=")
            key = key.strip()
            value = json.loads(value.strip())
            if key == "label":
                current["label"] = value
            elif "." in key:
                prop, _, akey = key.partition(".")
                annotations.setdefault(f"{current['id']}.{prop}", {})[akey] = value
            else:
                annotations.setdefault(current["id"], {})[key] = value
        elif kind == "Data Property":
            parts = rest.split()
            if len(parts) != 2:
                raise ValueError(f"line {raw_no}: malformed data property {rest!r}")
            current["data"].append(DataProperty(parts[0], parts[1]))
        else:
            parts = rest.split()
            if len(parts) != 3 or parts[1].upper() != "REFERENCES":
                raise ValueError(f"line {raw_no}: malformed object property {rest!r}")
            current["obj"].append(ObjectProperty(parts[0], parts[2]))
    if current is not None:
        raise ValueError("unterminated class block")
    return Ontology(tuple(classes), annotations)


# --- binding serialization --------------------------------------------------------


def serialize_bindings(bind: BindingSet, only: set[str] | None = None) -> str:
    """Render bindings per class in id order using t/t2/... table aliases."""
    blocks = []
    for cid in sorted(bind.class_bindings):
        if only is not None and cid not in only:
            continue
        primary = bind.class_bindings[cid]
        aliases: dict[str, str] = {primary.lower(): "t"}
        order: list[tuple[str, str]] = [("t", primary)]

        def alias_for(table: str) -> str:
            key = table.lower()
            if key not in aliases:
                aliases[key] = f"t{len(order) + 1}"
                order.append((aliases[key], table))
            return aliases[key]

        prop_lines: list[str] = []
        for (c, prop), (table, col) in bind.property_bindings.items():
            if c != cid:
                continue
            prop_lines.append(f"c.{prop} => {alias_for(table)}.{col}")
        for (c, prop), join in bind.object_bindings.items():
            if c != cid:
                continue
            target_alias = alias_for(join.target_table)
            pairs = " AND ".join(
                f"t.{lc} = {target_alias}.{tc}"
                for lc, tc in zip(join.local_columns, join.target_columns)
            )
            prop_lines.append(f"c.{prop} => {target_alias}.{join.target_table} ON {pairs}")
        header = f"@Class@ c: {cid} => " + ", ".join(
            f"@Table@ {alias}: {table}" for alias, table in order
        )
        body = ",\n".join(f"    {line}" for line in prop_lines)
        blocks.append(header + ("\n" + body if body else ""))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


_BIND_HEADER_RE = re.compile(r"^@Class@\s+c:\s*(\S+)\s*=>\s*(.+)$")
_BIND_TABLE_RE = re.compile(r"@Table@\s+(\w+):\s*([^\s,]+)")
_BIND_OBJ_RE = re.compile(r"^c\.(\S+)\s*=>\s*(\w+)\.(\S+)\s+ON\s+(.+?),?$")
_BIND_DATA_RE = re.compile(r"^c\.(\S+)\s*=>\s*(\w+)\.(\S+?),?$")
_BIND_PAIR_RE = re.compile(r"t\.(\w+)\s*=\s*(\w+)\.(\w+)")


def deserialize_bindings(text: str, model: PhysicalModel) -> BindingSet:
    """Parse arrow-format binding text; the paired model supplies structure."""
    class_bindings: dict[str, str] = {}
    property_bindings: dict[tuple[str, str], tuple[str, str]] = {}
    object_bindings: dict[tuple[str, str], FkJoin] = {}
    current_cid: str | None = None
    aliases: dict[str, str] = {}
    for raw_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("@Class@"):
            m = _BIND_HEADER_RE.match(line)
            if not m:
                raise ValueError(f"line {raw_no}: malformed binding header")
            current_cid = m.group(1)
            aliases = {}
            for alias, table in _BIND_TABLE_RE.findall(m.group(2)):
                aliases[alias] = table
            if "t" not in aliases:
                raise ValueError(f"line {raw_no}: binding header missing primary table")
            class_bindings[current_cid] = aliases["t"]
            continue
        if current_cid is None:
            raise ValueError(f"line {raw_no}: binding line outside a class block")
        m = _BIND_OBJ_RE.match(line)
        if m:
            prop, alias, target_table, pairs_text = m.groups()
            locals_, targets = [], []
            for lc, t_alias, tc in _BIND_PAIR_RE.findall(pairs_text):
                locals_.append(lc)
                targets.append(tc)
                if t_alias != alias:
                    raise ValueError(f"line {raw_no}: join pair uses mismatched alias")
            if not locals_:
                raise ValueError(f"line {raw_no}: join without column pairs")
            object_bindings[(current_cid, prop)] = FkJoin(
                class_bindings[current_cid], tuple(locals_), target_table, tuple(targets)
            )
            continue
        m = _BIND_DATA_RE.match(line)
        if m:
            prop, alias, col = m.groups()
            table = aliases.get(alias)
            if table is None:
                raise ValueError(f"line {raw_no}: unknown table alias {alias!r}")
            property_bindings[(current_cid, prop)] = (table, col)
            continue
        raise ValueError(f"line {raw_no}: unrecognized binding line {line!r}")
    return BindingSet(model, class_bindings, property_bindings, object_bindings)


# --- grounding ---------------------------------------------------------------------


@dataclass(frozen=True)
class GroundedSchema:
    """Physical fragments (tables, columns, foreign keys) backing a set of
    ontology entities; what prompt assembly renders and checkers validate."""

    tables: tuple[TableDef, ...] = ()

    def table(self, name: str) -> TableDef | None:
        lowered = name.lower()
        for tab in self.tables:
            if tab.name.lower() == lowered:
                return tab
        return None

    def fk_pairs(self) -> set[tuple[str, str, str, str]]:
        """Normalized (table, column, table, column) pairs, both directions."""
        pairs: set[tuple[str, str, str, str]] = set()
        for tab in self.tables:
            for fk in tab.foreign_keys:
                for lc, tc in zip(fk.columns, fk.target_columns):
                    a = (tab.name.lower(), lc.lower())
                    b = (fk.target_table.lower(), tc.lower())
                    pairs.add(a + b)
                    pairs.add(b + a)
        return pairs


def ground(entities: Iterable[str], bind: BindingSet) -> GroundedSchema:
    """Resolve entity refs ("class" or "class.prop") into physical fragments.

    A bare class ref pulls in every bound property of the class. The result
    contains only tables and columns actually referenced, with foreign keys
    kept when both endpoints survived.
    """
    needed: dict[str, set[str]] = {}  # table lower -> column lowers
    display: dict[str, str] = {}

    def need(table: str, column: str | None) -> None:
        key = table.lower()
        display.setdefault(key, table)
        cols = needed.setdefault(key, set())
        if column is not None:
            cols.add(column.lower())

    for ref in entities:
        if "." in ref:
            cid, _, prop = ref.partition(".")
            binding = bind.property_bindings.get((cid, prop))
            if binding is None:
                raise UnboundEntityError(f"no binding for property {ref}", entity=ref)
            need(*binding)
        else:
            if ref not in bind.class_bindings:
                raise UnboundEntityError(f"no binding for class {ref}", entity=ref)
            need(bind.class_bindings[ref], None)
            found = False
            for (cid, _prop), (table, col) in bind.property_bindings.items():
                if cid == ref:
                    need(table, col)
                    found = True
            if not found and bind.model.table(bind.class_bindings[ref]) is None:
                raise UnknownEntityError(f"class {ref} binds a missing table", entity=ref)

    fragments: list[TableDef] = []
    for key in sorted(needed):
        table = bind.model.table(key)
        if table is None:
            raise UnboundEntityError(f"Table {display[key]} does not exist", entity=display[key])
        cols = tuple(c for c in table.columns if c.name.lower() in needed[key])
        pk = table.primary_key if all(c.lower() in needed[key] for c in table.primary_key) else ()
        fks = []
        for fk in table.foreign_keys:
            tkey = fk.target_table.lower()
            if tkey not in needed:
                continue
            if all(c.lower() in needed[key] for c in fk.columns) and all(
                c.lower() in needed[tkey] for c in fk.target_columns
            ):
                fks.append(fk)
        fragments.append(TableDef(table.name, cols, pk, tuple(fks)))
    return GroundedSchema(tuple(fragments))


def render_create_tables(grounded: GroundedSchema) -> str:
    """CREATE TABLE text for prompts; one statement per line, lowered types."""
    statements = []
    for table in grounded.tables:
        parts = [f"{col.name} {col.sql_type.lower()}" for col in table.columns]
        if table.primary_key:
            parts.append(f"PRIMARY KEY ({', '.join(table.primary_key)})")
        for fk in table.foreign_keys:
            parts.append(
                f"FOREIGN KEY ({', '.join(fk.columns)}) "
                f"REFERENCES {fk.target_table}({', '.join(fk.target_columns)})"
            )
        statements.append(f"CREATE TABLE {table.name} ({', '.join(parts)});")
    return "\n".join(statements)
