"""Refinement policies: mechanical, auditable edits to a derived ontology.

A policy pairs one condition (suffix-match, regex-match, rename-map,
degree-equals) with one action from a closed set. Application is pure:
``apply_policy`` returns new ontology and binding structures, never mutating
its inputs, and ``apply_policies`` folds a list left-to-right collecting an
audit trail. Conditions are evaluated against the ontology as it stands
when the policy runs, so later policies see earlier edits.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace

from .errors import PolicyConflictError
from .ontology import (
    BindingSet,
    DataProperty,
    ObjectProperty,
    Ontology,
    OntologyClass,
)

logger = logging.getLogger(__name__)

CONDITION_KINDS = ("suffix-match", "regex-match", "rename-map", "degree-equals")
ACTION_KINDS = (
    "delete_class",
    "rename_class",
    "rename_property",
    "merge_classes",
    "partition_class",
    "remove_property",
    "collapse_to_referencing",
)


@dataclass(frozen=True)
class Condition:
    kind: str
    text: str = ""
    mapping: tuple[tuple[str, str], ...] = ()
    number: int = 0


@dataclass(frozen=True)
class Action:
    kind: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class RefinementPolicy:
    id: str
    condition: Condition
    action: Action


@dataclass(frozen=True)
class PolicyEvent:
    policy_id: str
    action: str
    subject: str
    note: str = ""


# --- policy file parsing ---------------------------------------------------------

_COND_RE = re.compile(r"^([a-z-]+)\s*(?:\((.*)\))?$")


def _parse_condition(text: str) -> Condition:
    m = _COND_RE.match(text.strip())
    if not m or m.group(1) not in CONDITION_KINDS:
        raise ValueError(f"unknown condition {text!r}")
    kind, arg = m.group(1), (m.group(2) or "").strip()
    if kind == "suffix-match":
        if not arg:
            raise ValueError("suffix-match requires a suffix")
        return Condition(kind, text=arg)
    if kind == "regex-match":
        re.compile(arg)  # validate eagerly
        return Condition(kind, text=arg)
    if kind == "degree-equals":
        return Condition(kind, number=int(arg))
    pairs = []
    for part in arg.split(","):
        old, sep, new = part.partition("=")
        if not sep or not old.strip() or not new.strip():
            raise ValueError(f"malformed rename-map entry {part!r}")
        pairs.append((old.strip(), new.strip()))
    if not pairs:
        raise ValueError("rename-map requires at least one entry")
    return Condition(kind, mapping=tuple(pairs))


def _parse_action(text: str) -> Action:
    m = re.match(r"^([a-z_]+)\s*(?:\((.*)\))?$", text.strip())
    if not m or m.group(1) not in ACTION_KINDS:
        raise ValueError(f"unknown action {text!r}")
    kind, arg = m.group(1), (m.group(2) or "").strip()
    if kind == "partition_class":
        return Action(kind, (arg,))
    args = tuple(a.strip() for a in arg.split(",") if a.strip()) if arg else ()
    return Action(kind, args)


def parse_policy_file(text: str) -> list[RefinementPolicy]:
    """Parse key:value policy documents separated by ``---`` lines."""
    policies = []
    for doc in re.split(r"^---\s*$", text, flags=re.MULTILINE):
        fields: dict[str, str] = {}
        for line in doc.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition(":")
            if not sep:
                raise ValueError(f"malformed policy line {line!r}")
            fields[key.strip()] = value.strip()
        if not fields:
            continue
        for required in ("name", "condition", "action"):
            if required not in fields:
                raise ValueError(f"policy missing {required!r}")
        policies.append(
            RefinementPolicy(
                fields["name"],
                _parse_condition(fields["condition"]),
                _parse_action(fields["action"]),
            )
        )
    return policies


# --- condition evaluation ---------------------------------------------------------


def _degree(onto: Ontology, class_id: str) -> int:
    out = len(onto.get_class(class_id).object_properties)
    inbound = sum(
        1 for src, target, _ in onto.edges() if target == class_id and src != class_id
    )
    return out + inbound


def matched_classes(onto: Ontology, cond: Condition) -> list[str]:
    """Class ids matching the condition, in ontology order."""
    out = []
    for cls in onto.classes:
        if cond.kind == "suffix-match":
            suffix = cond.text.lower()
            if cls.id.endswith(suffix) or cls.label.lower().endswith(suffix):
                out.append(cls.id)
        elif cond.kind == "regex-match":
            if re.search(cond.text, cls.id) or re.search(cond.text, cls.label):
                out.append(cls.id)
        elif cond.kind == "degree-equals":
            if _degree(onto, cls.id) == cond.number:
                out.append(cls.id)
        else:  # rename-map: class name or any property name appears as a key
            keys = {old.lower() for old, _ in cond.mapping}
            if cls.id in keys or cls.label.lower() in keys:
                out.append(cls.id)
            elif any(p.lower() in keys for p in cls.property_names()):
                out.append(cls.id)
    return out


# --- action application -----------------------------------------------------------


def _rebuild(onto: Ontology, classes: list[OntologyClass]) -> Ontology:
    kept = {c.id for c in classes}
    annotations = {
        eid: dict(kv)
        for eid, kv in onto.annotations.items()
        if eid.split(".", 1)[0] in kept
    }
    return Ontology(tuple(classes), annotations)


def _drop_class(onto: Ontology, bind: BindingSet, cid: str,
                retarget: str | None = None) -> tuple[Ontology, BindingSet]:
    """Remove a class; incoming object properties are retargeted or dropped."""
    classes: list[OntologyClass] = []
    object_bindings = {k: v for k, v in bind.object_bindings.items() if k[0] != cid}
    for cls in onto.classes:
        if cls.id == cid:
            continue
        obj_props = []
        for prop in cls.object_properties:
            if prop.target != cid:
                obj_props.append(prop)
            elif retarget is not None:
                new_name = _retarget_name(cls, prop, retarget)
                if new_name != prop.name:
                    object_bindings[(cls.id, new_name)] = object_bindings.pop(
                        (cls.id, prop.name)
                    )
                obj_props.append(ObjectProperty(new_name, retarget))
            else:
                object_bindings.pop((cls.id, prop.name), None)
        classes.append(replace(cls, object_properties=tuple(obj_props)))
    new_bind = BindingSet(
        bind.model,
        {k: v for k, v in bind.class_bindings.items() if k != cid},
        {k: v for k, v in bind.property_bindings.items() if k[0] != cid},
        object_bindings,
    )
    return _rebuild(onto, classes), new_bind


def _retarget_name(cls: OntologyClass, prop: ObjectProperty, new_target: str) -> str:
    """Prefer the has_<target> convention after retargeting when it stays unique."""
    if prop.name != f"has_{prop.target}":
        return prop.name
    candidate = f"has_{new_target}"
    taken = {p.lower() for p in cls.property_names() if p != prop.name}
    return candidate if candidate.lower() not in taken else prop.name


def _apply_delete(onto, bind, cids, events, policy_id):
    for cid in cids:
        onto, bind = _drop_class(onto, bind, cid)
        events.append(PolicyEvent(policy_id, "delete_class", cid))
    return onto, bind


def _apply_rename_class(onto, bind, cids, action, cond, events, policy_id):
    for cid in cids:
        if action.args:
            new_label = action.args[0]
        else:
            lookup = {old.lower(): new for old, new in cond.mapping}
            cls = onto.get_class(cid)
            new_label = lookup.get(cid) or lookup.get(cls.label.lower())
            if new_label is None:
                continue
        new_id = new_label.lower()
        if new_id == cid and new_label == onto.get_class(cid).label:
            continue
        if new_id != cid and onto.get_class(new_id) is not None:
            raise PolicyConflictError(
                f"rename of {cid} collides with existing class {new_id}",
                ids=[cid, new_id],
            )
        prop_renames: dict[tuple[str, str], str] = {}  # (owner after rename, old) -> new
        classes = []
        for cls in onto.classes:
            owner = new_id if cls.id == cid else cls.id
            obj_props = []
            for prop in cls.object_properties:
                if prop.target == cid:
                    name = _retarget_name(cls, prop, new_id)
                    if name != prop.name:
                        prop_renames[(owner, prop.name)] = name
                    obj_props.append(ObjectProperty(name, new_id))
                else:
                    obj_props.append(prop)
            if cls.id == cid:
                classes.append(
                    OntologyClass(new_id, new_label, cls.data_properties, tuple(obj_props))
                )
            else:
                classes.append(replace(cls, object_properties=tuple(obj_props)))
        annotations = {}
        for eid, kv in onto.annotations.items():
            head, dot, rest = eid.partition(".")
            if head == cid:
                head = new_id
            annotations[head + dot + rest] = dict(kv)
        object_bindings = {}
        for (c, p), join in bind.object_bindings.items():
            owner = new_id if c == cid else c
            object_bindings[(owner, prop_renames.get((owner, p), p))] = join
        bind = BindingSet(
            bind.model,
            {(new_id if k == cid else k): v for k, v in bind.class_bindings.items()},
            {(new_id if c == cid else c, p): v
             for (c, p), v in bind.property_bindings.items()},
            object_bindings,
        )
        onto = Ontology(tuple(classes), annotations)
        events.append(PolicyEvent(policy_id, "rename_class", cid, f"-> {new_id}"))
    return onto, bind


def _apply_rename_property(onto, bind, cids, action, cond, events, policy_id):
    if action.args:
        pairs = [(action.args[0], action.args[1])]
    elif cond.kind == "rename-map":
        pairs = list(cond.mapping)
    else:
        raise PolicyConflictError(
            "rename_property needs explicit arguments or a rename-map condition"
        )
    lookup = {old.lower(): new for old, new in pairs}
    for cid in cids:
        cls = onto.get_class(cid)
        taken = {p.lower() for p in cls.property_names()}
        data_props, obj_props = list(cls.data_properties), list(cls.object_properties)
        changed = False
        for i, prop in enumerate(data_props):
            new_name = lookup.get(prop.name.lower())
            if new_name is None or new_name == prop.name:
                continue
            if new_name.lower() in taken:
                raise PolicyConflictError(
                    f"renaming {cid}.{prop.name} collides with {cid}.{new_name}",
                    ids=[f"{cid}.{prop.name}", f"{cid}.{new_name}"],
                )
            taken.discard(prop.name.lower())
            taken.add(new_name.lower())
            data_props[i] = DataProperty(new_name, prop.sql_type)
            bind = replace(
                bind,
                property_bindings={
                    ((c, new_name) if (c, p) == (cid, prop.name) else (c, p)): v
                    for (c, p), v in bind.property_bindings.items()
                },
            )
            events.append(
                PolicyEvent(policy_id, "rename_property", f"{cid}.{prop.name}", f"-> {new_name}")
            )
            changed = True
        for i, prop in enumerate(obj_props):
            new_name = lookup.get(prop.name.lower())
            if new_name is None or new_name == prop.name:
                continue
            if new_name.lower() in taken:
                raise PolicyConflictError(
                    f"renaming {cid}.{prop.name} collides with {cid}.{new_name}",
                    ids=[f"{cid}.{prop.name}", f"{cid}.{new_name}"],
                )
            taken.discard(prop.name.lower())
            taken.add(new_name.lower())
            obj_props[i] = ObjectProperty(new_name, prop.target)
            bind = replace(
                bind,
                object_bindings={
                    ((c, new_name) if (c, p) == (cid, prop.name) else (c, p)): v
                    for (c, p), v in bind.object_bindings.items()
                },
            )
            events.append(
                PolicyEvent(policy_id, "rename_property", f"{cid}.{prop.name}", f"-> {new_name}")
            )
            changed = True
        if changed:
            classes = [
                OntologyClass(cid, cls.label, tuple(data_props), tuple(obj_props))
                if c.id == cid else c
                for c in onto.classes
            ]
            onto = _rebuild(onto, classes)
    return onto, bind


def _signature(cls: OntologyClass) -> tuple:
    data = tuple(sorted((p.name.lower(), p.sql_type) for p in cls.data_properties))
    obj = tuple(sorted((p.name.lower(), p.target) for p in cls.object_properties))
    return data, obj


def _apply_merge(onto, bind, cids, action, events, policy_id):
    if not action.args:
        raise PolicyConflictError("merge_classes requires a target class argument")
    target = action.args[0].lower()
    target_cls = onto.get_class(target)
    if target_cls is None:
        raise PolicyConflictError(f"merge target {target} does not exist", ids=[target])
    for cid in cids:
        if cid == target:
            continue
        cls = onto.get_class(cid)
        if cls is None:
            continue
        if _signature(cls) != _signature(target_cls):
            raise PolicyConflictError(
                f"cannot merge {cid} into {target}: property signatures differ",
                ids=[cid, target],
            )
        onto, bind = _drop_class(onto, bind, cid, retarget=target)
        events.append(PolicyEvent(policy_id, "merge_classes", cid, f"-> {target}"))
        target_cls = onto.get_class(target)
    return onto, bind


def _apply_partition(onto, bind, cids, action, events, policy_id):
    spec = action.args[0] if action.args else ""
    groups: list[tuple[str, tuple[str, ...]]] = []
    for part in spec.split("|"):
        name, sep, props = part.partition(":")
        if not sep:
            raise PolicyConflictError(f"malformed partition group {part!r}")
        prop_names = tuple(p.strip() for p in props.split(",") if p.strip())
        groups.append((name.strip().lower(), prop_names))
    if len(groups) < 2:
        raise PolicyConflictError("partition_class requires at least two groups")
    for cid in cids:
        cls = onto.get_class(cid)
        assigned = [p for _, props in groups for p in props]
        if sorted(x.lower() for x in assigned) != sorted(
            p.lower() for p in cls.property_names()
        ):
            raise PolicyConflictError(
                f"partition of {cid} must cover every property exactly once",
                ids=[cid],
            )
        for gid, _props in groups:
            if gid != cid and onto.get_class(gid) is not None:
                raise PolicyConflictError(
                    f"partition group {gid} collides with existing class", ids=[gid]
                )
        table = bind.class_bindings[cid]
        new_classes: list[OntologyClass] = []
        class_bindings = dict(bind.class_bindings)
        property_bindings = dict(bind.property_bindings)
        object_bindings = dict(bind.object_bindings)
        del class_bindings[cid]
        for gid, prop_names in groups:
            wanted = {p.lower() for p in prop_names}
            data = tuple(p for p in cls.data_properties if p.name.lower() in wanted)
            obj = tuple(p for p in cls.object_properties if p.name.lower() in wanted)
            new_classes.append(OntologyClass(gid, gid, data, obj))
            class_bindings[gid] = table
            for p in data:
                property_bindings[(gid, p.name)] = property_bindings.pop((cid, p.name))
            for p in obj:
                object_bindings[(gid, p.name)] = object_bindings.pop((cid, p.name))
        first_gid = groups[0][0]
        classes: list[OntologyClass] = []
        for existing in onto.classes:
            if existing.id == cid:
                classes.extend(new_classes)
                continue
            obj_props = tuple(
                ObjectProperty(_retarget_name(existing, p, first_gid), first_gid)
                if p.target == cid else p
                for p in existing.object_properties
            )
            renames = {
                old.name: new.name
                for old, new in zip(existing.object_properties, obj_props)
                if old.name != new.name
            }
            for old_name, new_name in renames.items():
                object_bindings[(existing.id, new_name)] = object_bindings.pop(
                    (existing.id, old_name)
                )
            classes.append(replace(existing, object_properties=obj_props))
        onto = _rebuild(onto, classes)
        bind = BindingSet(bind.model, class_bindings, property_bindings, object_bindings)
        events.append(
            PolicyEvent(policy_id, "partition_class", cid,
                        "-> " + ", ".join(g for g, _ in groups))
        )
    return onto, bind


def _apply_remove_property(onto, bind, cids, action, events, policy_id):
    if not action.args:
        raise PolicyConflictError("remove_property requires a property name")
    name = action.args[0].lower()
    for cid in cids:
        cls = onto.get_class(cid)
        data = tuple(p for p in cls.data_properties if p.name.lower() != name)
        obj = tuple(p for p in cls.object_properties if p.name.lower() != name)
        if len(data) == len(cls.data_properties) and len(obj) == len(cls.object_properties):
            continue
        classes = [
            OntologyClass(cid, cls.label, data, obj) if c.id == cid else c
            for c in onto.classes
        ]
        onto = _rebuild(onto, classes)
        bind = BindingSet(
            bind.model,
            bind.class_bindings,
            {k: v for k, v in bind.property_bindings.items()
             if not (k[0] == cid and k[1].lower() == name)},
            {k: v for k, v in bind.object_bindings.items()
             if not (k[0] == cid and k[1].lower() == name)},
        )
        events.append(PolicyEvent(policy_id, "remove_property", f"{cid}.{name}"))
    return onto, bind


def _apply_collapse(onto, bind, cids, events, policy_id):
    for cid in cids:
        cls = onto.get_class(cid)
        if cls is None:
            continue
        referencers = [
            c for c in onto.classes
            if c.id != cid and any(p.target == cid for p in c.object_properties)
        ]
        if not referencers:
            events.append(
                PolicyEvent(policy_id, "collapse_to_referencing", cid,
                            "skipped: no referencing class")
            )
            continue
        migrated = list(cls.data_properties)
        migrated_bindings = {
            p.name: bind.property_bindings[(cid, p.name)] for p in migrated
        }
        onto, bind = _drop_class(onto, bind, cid)
        property_bindings = dict(bind.property_bindings)
        classes = []
        for existing in onto.classes:
            if existing.id not in {r.id for r in referencers}:
                classes.append(existing)
                continue
            taken = {p.lower() for p in existing.property_names()}
            new_data = list(existing.data_properties)
            for prop in migrated:
                name = prop.name
                if name.lower() in taken:
                    name = f"{cid}_{prop.name}"
                    if name.lower() in taken:
                        raise PolicyConflictError(
                            f"collapse of {cid} into {existing.id} collides on {prop.name}",
                            ids=[f"{existing.id}.{prop.name}", f"{cid}.{prop.name}"],
                        )
                taken.add(name.lower())
                new_data.append(DataProperty(name, prop.sql_type))
                property_bindings[(existing.id, name)] = migrated_bindings[prop.name]
            classes.append(replace(existing, data_properties=tuple(new_data)))
        onto = _rebuild(onto, classes)
        bind = replace(bind, property_bindings=property_bindings)
        events.append(
            PolicyEvent(policy_id, "collapse_to_referencing", cid,
                        "-> " + ", ".join(r.id for r in referencers))
        )
    return onto, bind


def apply_policy(
    onto: Ontology, bind: BindingSet, policy: RefinementPolicy
) -> tuple[Ontology, BindingSet, tuple[PolicyEvent, ...]]:
    """Apply one policy; returns new structures and the events it produced.

    A policy whose condition matches nothing is a no-op that still reports
    cleanly through the (empty) event list.
    """
    cids = matched_classes(onto, policy.condition)
    events: list[PolicyEvent] = []
    if not cids:
        return onto, bind, ()
    kind = policy.action.kind
    if kind == "delete_class":
        onto, bind = _apply_delete(onto, bind, cids, events, policy.id)
    elif kind == "rename_class":
        onto, bind = _apply_rename_class(
            onto, bind, cids, policy.action, policy.condition, events, policy.id
        )
    elif kind == "rename_property":
        onto, bind = _apply_rename_property(
            onto, bind, cids, policy.action, policy.condition, events, policy.id
        )
    elif kind == "merge_classes":
        onto, bind = _apply_merge(onto, bind, cids, policy.action, events, policy.id)
    elif kind == "partition_class":
        onto, bind = _apply_partition(onto, bind, cids, policy.action, events, policy.id)
    elif kind == "remove_property":
        onto, bind = _apply_remove_property(
            onto, bind, cids, policy.action, events, policy.id
        )
    else:
        onto, bind = _apply_collapse(onto, bind, cids, events, policy.id)
    return onto, bind, tuple(events)


def apply_policies(
    onto: Ontology, bind: BindingSet, policies: list[RefinementPolicy]
) -> tuple[Ontology, BindingSet, tuple[PolicyEvent, ...]]:
    """Left fold of policies with a combined audit trail.

    Raises PolicyConflictError when two policies share an id; order is
    otherwise the caller's responsibility and is part of the result.
    """
    seen: set[str] = set()
    for policy in policies:
        if policy.id in seen:
            raise PolicyConflictError(f"duplicate policy id {policy.id}", ids=[policy.id])
        seen.add(policy.id)
    trail: list[PolicyEvent] = []
    for policy in policies:
        onto, bind, events = apply_policy(onto, bind, policy)
        trail.extend(events)
    return onto, bind, tuple(trail)
