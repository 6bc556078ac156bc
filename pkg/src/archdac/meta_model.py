"""The canonical meta-descriptor: components, relations, external nodes.

Every frontend produces this model and every backend consumes it, so its
text form is the unit everything else is compared against. Serialization
is byte-deterministic: equal models always render to identical bytes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Mapping

from . import yamlio
from .errors import InvalidModel, SchemaError

__all__ = [
    "Component",
    "ComponentKind",
    "ExternalNode",
    "MetaDescriptor",
    "ModelFinding",
    "NodeClass",
    "PROPERTY_VOCABULARY",
    "Relation",
    "RelationKind",
    "RelationOrigin",
    "SourceInfo",
    "ValidationReport",
    "deserialize",
    "serialize_canonical",
    "text_digest",
    "validate",
]


class ComponentKind(str, Enum):
    DEPLOYABLE = "deployable"
    INFRASTRUCTURE = "infrastructure"


class RelationKind(str, Enum):
    DEPENDS_ON = "depends_on"
    EXPOSES = "exposes"
    INTERACTS = "interacts"


class RelationOrigin(str, Enum):
    DESCRIPTOR = "descriptor"
    ANNOTATION = "annotation"


class NodeClass(str, Enum):
    PERSON = "person"
    EXTERNAL_SYSTEM = "external_system"


# Property keys a component may carry without an ``x-`` escape hatch.
PROPERTY_VOCABULARY = frozenset(
    {
        "volumes",
        "ports",
        "targetPort",
        "port",
        "expose",
        "networks",
        "data_source",
        "input_variables",
        "environment",
        "sidecars",
    }
)

Scalar = Any  # str | int | bool in practice; YAML floats tolerated


def _freeze_value(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return value


@dataclass(frozen=True)
class Component:
    """One deployable or infrastructure node recovered from a descriptor."""

    id: str
    name: str
    component_type: str | None = None
    kind: ComponentKind = ComponentKind.DEPLOYABLE
    properties: dict[str, Scalar] = field(default_factory=dict)
    artifacts: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "properties",
            {key: _freeze_value(val) for key, val in self.properties.items()},
        )
        object.__setattr__(self, "artifacts", dict(self.artifacts))


@dataclass(frozen=True)
class Relation:
    """Directed edge; ``out`` is the dependent side, ``in_`` the dependency."""

    out: str
    in_: str
    kind: RelationKind = RelationKind.DEPENDS_ON
    label: str | None = None
    origin: RelationOrigin = RelationOrigin.DESCRIPTOR

    @property
    def sort_key(self) -> tuple[str, str, str]:
        return (self.out, self.in_, self.kind.value)


@dataclass(frozen=True)
class ExternalNode:
    """A person or external system interacting with the architecture."""

    id: str
    label: str
    node_class: NodeClass = NodeClass.EXTERNAL_SYSTEM


@dataclass(frozen=True)
class SourceInfo:
    """Where a model came from; never serialized, excluded from equality."""

    kind: str
    digest: str


@dataclass(frozen=True)
class MetaDescriptor:
    components: tuple[Component, ...] = ()
    relations: tuple[Relation, ...] = ()
    externals: tuple[ExternalNode, ...] = ()
    source: SourceInfo | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(
            self,
            "relations",
            tuple(sorted(self.relations, key=lambda r: r.sort_key)),
        )
        object.__setattr__(
            self,
            "externals",
            tuple(sorted(self.externals, key=lambda e: e.id)),
        )

    def component_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.components)

    def node_ids(self) -> frozenset[str]:
        return frozenset(c.id for c in self.components) | frozenset(
            e.id for e in self.externals
        )

    def get_component(self, component_id: str) -> Component | None:
        for component in self.components:
            if component.id == component_id:
                return component
        return None


@dataclass(frozen=True)
class ModelFinding:
    severity: str
    code: str
    subject: str
    message: str
    details: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[ModelFinding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    @property
    def errors(self) -> tuple[ModelFinding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")


def _depends_on_cycles(meta: MetaDescriptor) -> list[tuple[str, ...]]:
    """Cycles in the depends_on subgraph, each reported once, as closed paths."""
    adjacency: dict[str, list[str]] = {}
    for relation in meta.relations:
        if relation.kind is RelationKind.DEPENDS_ON:
            adjacency.setdefault(relation.out, []).append(relation.in_)
    for targets in adjacency.values():
        targets.sort()

    cycles: list[tuple[str, ...]] = []
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    order = [c.id for c in meta.components] + [e.id for e in meta.externals]

    def visit(node: str, trail: list[str]) -> None:
        state[node] = 1
        trail.append(node)
        for nxt in adjacency.get(node, ()):
            mark = state.get(nxt)
            if mark == 1:
                start = trail.index(nxt)
                cycles.append(tuple(trail[start:]) + (nxt,))
            elif mark is None:
                visit(nxt, trail)
        trail.pop()
        state[node] = 2

    for root in order:
        if root not in state:
            visit(root, [])
    return cycles


def validate(meta: MetaDescriptor) -> ValidationReport:
    """Check every model invariant; findings are data, not failures."""
    findings: list[ModelFinding] = []
    seen: dict[str, str] = {}

    for component in meta.components:
        if not component.id:
            findings.append(
                ModelFinding("error", "empty-id", "<component>", "component id is empty")
            )
            continue
        if component.id in seen:
            findings.append(
                ModelFinding(
                    "error",
                    "duplicate-id",
                    component.id,
                    f"component id {component.id!r} declared more than once",
                )
            )
        seen[component.id] = "component"
        if not component.name:
            findings.append(
                ModelFinding(
                    "error", "empty-name", component.id, "component name is empty"
                )
            )
        replicas = component.artifacts.get("replicas")
        if replicas is not None and (not str(replicas).isdigit() or int(replicas) < 1):
            findings.append(
                ModelFinding(
                    "error",
                    "bad-replicas",
                    component.id,
                    f"artifacts.replicas must be a positive integer, got {replicas!r}",
                )
            )
        for key in component.properties:
            if key not in PROPERTY_VOCABULARY and not key.startswith("x-"):
                findings.append(
                    ModelFinding(
                        "error",
                        "unknown-property",
                        component.id,
                        f"property key {key!r} is outside the vocabulary "
                        "(prefix pass-through keys with 'x-')",
                    )
                )

    for external in meta.externals:
        if external.id in seen:
            findings.append(
                ModelFinding(
                    "error",
                    "duplicate-id",
                    external.id,
                    f"external id {external.id!r} collides with a {seen[external.id]}",
                )
            )
        seen[external.id] = "external node"

    known = set(seen)
    for index, relation in enumerate(meta.relations):
        subject = f"relations[{index}]"
        if relation.out == relation.in_:
            findings.append(
                ModelFinding(
                    "error",
                    "self-relation",
                    subject,
                    f"relation {relation.out!r} -> {relation.in_!r} depends on itself",
                )
            )
        for side, value in (("out", relation.out), ("in", relation.in_)):
            if value not in known:
                findings.append(
                    ModelFinding(
                        "error",
                        "unknown-endpoint",
                        f"{subject}.{side}",
                        f"relation endpoint {value!r} names no component or external node",
                    )
                )

    for cycle in _depends_on_cycles(meta):
        findings.append(
            ModelFinding(
                "error",
                "cycle",
                cycle[0],
                "dependency cycle: " + " -> ".join(cycle),
                details=cycle,
            )
        )

    return ValidationReport(tuple(findings))


def _component_doc(component: Component) -> dict:
    doc: dict[str, Any] = {"name": component.name}
    if component.component_type is not None:
        doc["type"] = component.component_type
    if component.properties:
        doc["properties"] = {
            key: list(val) if isinstance(val, tuple) else val
            for key, val in sorted(component.properties.items())
        }
    if component.artifacts:
        doc["artifacts"] = dict(sorted(component.artifacts.items()))
    if component.kind is not ComponentKind.DEPLOYABLE:
        doc["kind"] = component.kind.value
    return doc


def _relation_doc(relation: Relation) -> dict:
    doc: dict[str, Any] = {"out": relation.out, "in": relation.in_}
    if relation.kind is not RelationKind.DEPENDS_ON:
        doc["kind"] = relation.kind.value
    if relation.label is not None:
        doc["label"] = relation.label
    if relation.origin is not RelationOrigin.DESCRIPTOR:
        doc["origin"] = relation.origin.value
    return doc


def serialize_canonical(meta: MetaDescriptor) -> str:
    """Render the canonical text form (UTF-8, LF, 2-space indent).

    Components keep source order; relations and externals are sorted, so
    equal models always produce byte-identical documents.
    """
    report = validate(meta)
    if report.errors:
        first = report.errors[0]
        raise InvalidModel(f"model has error findings: {first.subject}: {first.message}")
    doc: dict[str, Any] = {
        "components": {c.id: _component_doc(c) for c in meta.components}
    }
    if meta.relations:
        doc["relations"] = [_relation_doc(r) for r in meta.relations]
    if meta.externals:
        doc["externals"] = {
            e.id: {"label": e.label, "class": e.node_class.value}
            for e in meta.externals
        }
    return yamlio.dump_canonical(doc)


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _require_mapping(value: Any, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise SchemaError(f"{path}: expected a mapping, got {type(value).__name__}")
    return value


def _coerce_artifact(value: Any, path: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{path}: artifact values must be strings")
    return str(value)


_COMPONENT_KEYS = frozenset({"name", "type", "kind", "properties", "artifacts"})
_RELATION_KEYS = frozenset({"out", "in", "kind", "label", "origin"})


def _parse_enum(enum_cls: type[Enum], value: Any, path: str) -> Any:
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_cls)
        raise SchemaError(f"{path}: expected one of {allowed}, got {value!r}") from None


def deserialize(text: str) -> MetaDescriptor:
    """Parse a meta-descriptor document, normalizing non-canonical key order."""
    data = yamlio.load_one(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise SchemaError("top level must be a mapping")
    unknown = set(data) - {"components", "relations", "externals"}
    if unknown:
        raise SchemaError(f"unknown top-level key {sorted(unknown)[0]!r}")

    components: list[Component] = []
    for comp_id, body in _require_mapping(data.get("components"), "components").items():
        path = f"components.{comp_id}"
        body = _require_mapping(body, path)
        extra = set(body) - _COMPONENT_KEYS
        if extra:
            raise SchemaError(f"{path}: unknown key {sorted(extra)[0]!r}")
        properties: dict[str, Any] = {}
        for key, value in _require_mapping(body.get("properties"), f"{path}.properties").items():
            if isinstance(value, dict):
                raise SchemaError(f"{path}.properties.{key}: nested mappings not allowed")
            properties[str(key)] = _freeze_value(value)
        artifacts = {
            str(key): _coerce_artifact(value, f"{path}.artifacts.{key}")
            for key, value in _require_mapping(body.get("artifacts"), f"{path}.artifacts").items()
        }
        kind = ComponentKind.DEPLOYABLE
        if "kind" in body:
            kind = _parse_enum(ComponentKind, body["kind"], f"{path}.kind")
        name = body.get("name", comp_id)
        if not isinstance(name, str):
            raise SchemaError(f"{path}.name: expected a string")
        comp_type = body.get("type")
        if comp_type is not None and not isinstance(comp_type, str):
            raise SchemaError(f"{path}.type: expected a string")
        components.append(
            Component(
                id=str(comp_id),
                name=name,
                component_type=comp_type,
                kind=kind,
                properties=properties,
                artifacts=artifacts,
            )
        )

    relations: list[Relation] = []
    raw_relations = data.get("relations") or []
    if not isinstance(raw_relations, list):
        raise SchemaError("relations: expected a sequence")
    for index, entry in enumerate(raw_relations):
        path = f"relations[{index}]"
        entry = _require_mapping(entry, path)
        extra = set(entry) - _RELATION_KEYS
        if extra:
            raise SchemaError(f"{path}: unknown key {sorted(extra)[0]!r}")
        if "out" not in entry or "in" not in entry:
            raise SchemaError(f"{path}: relation needs both 'out' and 'in'")
        kind = RelationKind.DEPENDS_ON
        if "kind" in entry:
            kind = _parse_enum(RelationKind, entry["kind"], f"{path}.kind")
        origin = RelationOrigin.DESCRIPTOR
        if "origin" in entry:
            origin = _parse_enum(RelationOrigin, entry["origin"], f"{path}.origin")
        relations.append(
            Relation(
                out=str(entry["out"]),
                in_=str(entry["in"]),
                kind=kind,
                label=entry.get("label"),
                origin=origin,
            )
        )

    externals: list[ExternalNode] = []
    for ext_id, body in _require_mapping(data.get("externals"), "externals").items():
        path = f"externals.{ext_id}"
        body = _require_mapping(body, path)
        extra = set(body) - {"label", "class"}
        if extra:
            raise SchemaError(f"{path}: unknown key {sorted(extra)[0]!r}")
        node_class = _parse_enum(
            NodeClass, body.get("class", "external_system"), f"{path}.class"
        )
        externals.append(
            ExternalNode(id=str(ext_id), label=str(body.get("label", ext_id)), node_class=node_class)
        )

    meta = MetaDescriptor(
        components=tuple(components),
        relations=tuple(relations),
        externals=tuple(externals),
    )
    report = validate(meta)
    if report.errors:
        first = report.errors[0]
        raise SchemaError(f"{first.subject}: {first.message}")
    return meta


def with_component(meta: MetaDescriptor, component: Component) -> MetaDescriptor:
    """Replace the component with the same id, keeping order."""
    components = tuple(
        component if existing.id == component.id else existing
        for existing in meta.components
    )
    return replace(meta, components=components)


def merge_relations(meta: MetaDescriptor, new: Iterable[Relation]) -> MetaDescriptor:
    existing = {(r.out, r.in_, r.kind) for r in meta.relations}
    added = [r for r in new if (r.out, r.in_, r.kind) not in existing]
    return replace(meta, relations=meta.relations + tuple(added))
