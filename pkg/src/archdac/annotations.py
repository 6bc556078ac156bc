"""Architecture annotations: comments supplying facts descriptors omit.

Grammar (one directive per line, in YAML comments or a sibling ``.arch``
file for JSON inputs)::

    # arch(<component-id|*>): <directive>=<value>

Directives:
    type=<string>                  set the component type (wins over inference)
    kind=deployable|infrastructure reclassify a component
    depends-on=<id>                add a dependency relation from the target
    external=<a>-><b> "<label>" <person|external_system>
                                   declare an external node plus an interacts
                                   relation; exactly one endpoint must be an
                                   existing id, the other names the new node
    entrypoint=<id|true>           mark the diagram's reading start
    ignore=<leaf-path>             move a source leaf into the ignored set
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum

from .errors import AnnotationError, DependencyCycle, UnknownTarget
from .ledger import CoverageLedger
from .meta_model import (
    Component,
    ComponentKind,
    ExternalNode,
    MetaDescriptor,
    NodeClass,
    Relation,
    RelationKind,
    RelationOrigin,
    validate,
)

_PREFIX_RE = re.compile(r"^\s*#\s*arch\b")
_LINE_RE = re.compile(
    r"^\s*#\s*arch\((?P<target>[^()\s]+)\):\s*(?P<directive>[a-z-]+)=(?P<value>.*\S)\s*$"
)
_EXTERNAL_RE = re.compile(
    r'^(?P<left>\S+)->(?P<right>\S+)\s+"(?P<label>[^"]*)"\s+(?P<cls>person|external_system)$'
)


class Directive(str, Enum):
    TYPE = "type"
    DEPENDS_ON = "depends-on"
    EXTERNAL = "external"
    ENTRYPOINT = "entrypoint"
    IGNORE = "ignore"
    KIND = "kind"


@dataclass(frozen=True)
class Annotation:
    target: str
    directive: Directive
    value: str
    source_line: int


def extract_annotations(text: str) -> list[Annotation]:
    """Collect annotations from comment lines; other comments are ignored."""
    annotations: list[Annotation] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not _PREFIX_RE.match(line):
            continue
        match = _LINE_RE.match(line)
        if not match:
            raise AnnotationError(
                f"malformed annotation: {line.strip()!r}", line=lineno
            )
        try:
            directive = Directive(match["directive"])
        except ValueError:
            raise AnnotationError(
                f"unknown annotation directive {match['directive']!r}", line=lineno
            ) from None
        value = match["value"].strip()
        if directive is Directive.KIND and value not in ("deployable", "infrastructure"):
            raise AnnotationError(
                f"kind must be 'deployable' or 'infrastructure', got {value!r}",
                line=lineno,
            )
        if directive is Directive.EXTERNAL and not _EXTERNAL_RE.match(value):
            raise AnnotationError(
                f"external annotation must look like 'a->b \"label\" person', got {value!r}",
                line=lineno,
            )
        annotations.append(
            Annotation(
                target=match["target"],
                directive=directive,
                value=value,
                source_line=lineno,
            )
        )
    return annotations


def _check_scalar_conflicts(annotations: list[Annotation]) -> None:
    chosen: dict[tuple[Directive, str], str] = {}
    for ann in annotations:
        if ann.directive not in (Directive.TYPE, Directive.KIND):
            continue
        key = (ann.directive, ann.target)
        if key in chosen and chosen[key] != ann.value:
            raise AnnotationError(
                f"conflicting {ann.directive.value!r} annotations on {ann.target!r}: "
                f"{chosen[key]!r} vs {ann.value!r}",
                line=ann.source_line,
            )
        chosen[key] = ann.value


def apply_annotations(
    meta: MetaDescriptor,
    annotations: list[Annotation],
    ledger: CoverageLedger | None = None,
) -> tuple[MetaDescriptor, CoverageLedger | None]:
    """Merge annotations into a model; annotation facts win over inference.

    The ledger argument only matters for ``ignore`` directives; when it is
    None they are skipped.
    """
    _check_scalar_conflicts(annotations)

    components = {c.id: c for c in meta.components}
    externals = {e.id: e for e in meta.externals}
    new_relations: list[Relation] = []

    def require_component(ann: Annotation) -> Component:
        component = components.get(ann.target)
        if component is None:
            raise UnknownTarget(
                f"annotation target {ann.target!r} is not a component",
                line=ann.source_line,
            )
        return component

    for ann in annotations:
        if ann.directive is Directive.TYPE:
            component = require_component(ann)
            components[ann.target] = replace(component, component_type=ann.value)

        elif ann.directive is Directive.KIND:
            component = require_component(ann)
            components[ann.target] = replace(
                component, kind=ComponentKind(ann.value)
            )

        elif ann.directive is Directive.ENTRYPOINT:
            comp_id = ann.target if ann.value == "true" else ann.value
            if comp_id == "*" or comp_id not in components:
                raise UnknownTarget(
                    f"entrypoint {comp_id!r} is not a component", line=ann.source_line
                )
            component = components[comp_id]
            properties = dict(component.properties)
            properties["x-entrypoint"] = True
            components[comp_id] = replace(component, properties=properties)

        elif ann.directive is Directive.DEPENDS_ON:
            component = require_component(ann)
            if ann.value not in components and ann.value not in externals:
                raise UnknownTarget(
                    f"depends-on target {ann.value!r} does not exist",
                    line=ann.source_line,
                )
            new_relations.append(
                Relation(
                    out=ann.target,
                    in_=ann.value,
                    kind=RelationKind.DEPENDS_ON,
                    origin=RelationOrigin.ANNOTATION,
                )
            )

        elif ann.directive is Directive.EXTERNAL:
            match = _EXTERNAL_RE.match(ann.value)
            assert match is not None  # grammar checked at extraction
            left, right = match["left"], match["right"]
            known = set(components) | set(externals)
            left_known, right_known = left in known, right in known
            if left_known == right_known:
                raise UnknownTarget(
                    f"external annotation {ann.value!r} must connect one new node "
                    "to one existing id",
                    line=ann.source_line,
                )
            new_id = right if left_known else left
            node = ExternalNode(
                id=new_id, label=match["label"], node_class=NodeClass(match["cls"])
            )
            existing = externals.get(new_id)
            if existing is not None and existing != node:
                raise AnnotationError(
                    f"external node {new_id!r} declared twice with different values",
                    line=ann.source_line,
                )
            externals[new_id] = node
            new_relations.append(
                Relation(
                    out=left,
                    in_=right,
                    kind=RelationKind.INTERACTS,
                    origin=RelationOrigin.ANNOTATION,
                )
            )

        elif ann.directive is Directive.IGNORE:
            if ledger is not None:
                ledger = ledger.with_ignored(ann.value)

    ordered = tuple(components[c.id] for c in meta.components)
    existing_edges = {(r.out, r.in_, r.kind) for r in meta.relations}
    merged = list(meta.relations)
    for relation in new_relations:
        key = (relation.out, relation.in_, relation.kind)
        if key not in existing_edges:
            existing_edges.add(key)
            merged.append(relation)

    result = MetaDescriptor(
        components=ordered,
        relations=tuple(merged),
        externals=tuple(externals.values()),
        source=meta.source,
    )
    for finding in validate(result).errors:
        if finding.code == "cycle":
            raise DependencyCycle(finding.message)
    return result, ledger
