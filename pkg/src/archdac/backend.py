"""Diagram-as-code emission: Structurizr DSL, Mermaid, and Graphviz DOT.

Emission is a pure function of (model, options): node statements carry the
component name, its type, its image, and a replica marker; arc statements
carry the relation kind. Every document starts with a header comment
recording the options used, so a stored diagram can be re-checked without
re-supplying them, and every document contains a styles/legend section.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import FormatUnknown, InvalidModel
from .meta_model import (
    Component,
    ComponentKind,
    ExternalNode,
    MetaDescriptor,
    NodeClass,
    Relation,
    text_digest,
    validate,
)

FORMATS = ("structurizr", "mermaid", "dot")
ORIENTATIONS = ("top-bottom", "left-right")

_COMMENT_PREFIX = {"structurizr": "#", "mermaid": "%%", "dot": "//"}

LEGEND_MARKERS = {
    "structurizr": "styles {",
    "mermaid": "classDef ",
    "dot": "// legend:",
}

# Identifiers that must never clash with a sanitized node id.
_RESERVED_IDENTIFIERS = frozenset(
    {
        "node",
        "edge",
        "graph",
        "digraph",
        "subgraph",
        "end",
        "class",
        "classdef",
        "style",
        "strict",
        "workspace",
        "model",
        "views",
        "styles",
        "container",
        "person",
        "softwaresystem",
        "system_boundary",
        "include",
        "autolayout",
        "direction",
    }
)


@dataclass(frozen=True)
class EmitOptions:
    orientation: str = "top-bottom"
    system_name: str = "Software System"
    include_properties: bool = True

    def __post_init__(self) -> None:
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")


@dataclass(frozen=True)
class DacDocument:
    format: str
    text: str
    digest: str
    options_used: EmitOptions = field(default_factory=EmitOptions)


def sanitize_identifiers(meta: MetaDescriptor) -> dict[str, str]:
    """Deterministic node-id to target-grammar identifier mapping."""
    mapping: dict[str, str] = {}
    used: set[str] = set()
    ids = [c.id for c in meta.components] + [e.id for e in meta.externals]
    for node_id in ids:
        base = re.sub(r"[^a-z0-9]+", "_", node_id.lower()).strip("_") or "n"
        if base[0].isdigit():
            base = f"n{base}"
        candidate = base
        suffix = 2
        while candidate in used or candidate in _RESERVED_IDENTIFIERS:
            candidate = f"{base}_{suffix}"
            suffix += 1
        used.add(candidate)
        mapping[node_id] = candidate
    return mapping


def _header(fmt: str, opts: EmitOptions) -> str:
    return (
        f"{_COMMENT_PREFIX[fmt]} archdac format={fmt} "
        f"orientation={opts.orientation} "
        f"include_properties={'true' if opts.include_properties else 'false'} "
        f"system={json.dumps(opts.system_name, ensure_ascii=False)}"
    )


_HEADER_RE = re.compile(
    r"^(?:#|%%|//) archdac format=(?P<fmt>\w+) "
    r"orientation=(?P<orient>[a-z-]+) "
    r"include_properties=(?P<props>true|false) "
    r"system=(?P<system>\"(?:[^\"\\]|\\.)*\")\s*$"
)


def parse_header(text: str) -> tuple[str, EmitOptions]:
    """Recover (format, options) from a document's first line."""
    first = text.split("\n", 1)[0]
    match = _HEADER_RE.match(first)
    if not match:
        raise FormatUnknown("diagram carries no recognizable options header")
    fmt = match["fmt"]
    if fmt not in FORMATS:
        raise FormatUnknown(f"unknown diagram format {fmt!r}")
    opts = EmitOptions(
        orientation=match["orient"],
        system_name=json.loads(match["system"]),
        include_properties=match["props"] == "true",
    )
    return fmt, opts


def _description(component: Component) -> str:
    parts = []
    if component.component_type:
        parts.append(component.component_type)
    replicas = component.artifacts.get("replicas")
    if replicas is not None:
        parts.append(f"Replicas: {replicas}")
    return ", ".join(parts)


def _property_lines(component: Component) -> list[str]:
    lines = []
    for key in sorted(component.properties):
        value = component.properties[key]
        if isinstance(value, tuple):
            rendered = ", ".join(str(v) for v in value)
        elif isinstance(value, bool):
            rendered = "true" if value else "false"
        else:
            rendered = str(value)
        lines.append(f"{key}: {rendered}")
    return lines


def _relation_label(relation: Relation) -> str:
    if relation.label:
        return f"{relation.kind.value}: {relation.label}"
    return relation.kind.value


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _emit_structurizr(meta: MetaDescriptor, opts: EmitOptions, ident: dict[str, str]) -> str:
    lines = [_header("structurizr", opts), "workspace {", "    model {"]
    for ext in meta.externals:
        if ext.node_class is NodeClass.PERSON:
            lines.append(f"        {ident[ext.id]} = person {_q(ext.label)}")
        else:
            lines.append(
                f"        {ident[ext.id]} = softwareSystem {_q(ext.label)} \"\" \"External\""
            )
    lines.append(f"        softwareSystem = softwareSystem {_q(opts.system_name)} {{")
    external_ids = {e.id for e in meta.externals}
    for component in meta.components:
        head = (
            f"            {ident[component.id]} = container "
            f"{_q(component.name)} {_q(_description(component))} "
            f"{_q(component.artifacts.get('image', ''))}"
        )
        replicas = component.artifacts.get("replicas")
        if replicas is not None:
            head += f" {_q(f'Replicas: {replicas}')}"
        props = _property_lines(component) if opts.include_properties else []
        if props:
            lines.append(head + " {")
            lines.append("                properties {")
            for key in sorted(component.properties):
                value = component.properties[key]
                if isinstance(value, tuple):
                    rendered = ", ".join(str(v) for v in value)
                elif isinstance(value, bool):
                    rendered = "true" if value else "false"
                else:
                    rendered = str(value)
                lines.append(f"                    {_q(key)} {_q(rendered)}")
            lines.append("                }")
            lines.append("            }")
        else:
            lines.append(head + " {}")
    for relation in meta.relations:
        if relation.out in external_ids or relation.in_ in external_ids:
            continue
        lines.append(
            f"            {ident[relation.out]} -> {ident[relation.in_]} "
            f"{_q(_relation_label(relation))}"
        )
    lines.append("        }")
    for relation in meta.relations:
        if relation.out in external_ids or relation.in_ in external_ids:
            lines.append(
                f"        {ident[relation.out]} -> {ident[relation.in_]} "
                f"{_q(_relation_label(relation))}"
            )
    lines.append("    }")
    lines.append("    views {")
    lines.append("        container softwareSystem {")
    lines.append("            include *")
    lines.append(
        "            autoLayout tb" if opts.orientation == "top-bottom" else "            autoLayout lr"
    )
    lines.append("        }")
    lines.append("        styles {")
    lines.append("            element \"Person\" {")
    lines.append("                shape Person")
    lines.append("            }")
    lines.append("            element \"External\" {")
    lines.append("                background #999999")
    lines.append("            }")
    lines.append("            element \"Container\" {")
    lines.append("                background #438dd5")
    lines.append("                color #ffffff")
    lines.append("            }")
    lines.append("        }")
    lines.append("    }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _mermaid_label(component: Component, opts: EmitOptions) -> str:
    parts = [component.name]
    if component.component_type:
        parts.append(component.component_type)
    image = component.artifacts.get("image")
    if image:
        parts.append(image)
    replicas = component.artifacts.get("replicas")
    if replicas is not None:
        parts.append(f"Replicas: {replicas}")
    if opts.include_properties:
        parts.extend(_property_lines(component))
    return "<br/>".join(p.replace('"', "&quot;") for p in parts)


def _emit_mermaid(meta: MetaDescriptor, opts: EmitOptions, ident: dict[str, str]) -> str:
    direction = "TD" if opts.orientation == "top-bottom" else "LR"
    boundary_label = opts.system_name.replace('"', "&quot;")
    lines = [
        _header("mermaid", opts),
        f"graph {direction}",
        f'    subgraph system_boundary["{boundary_label}"]',
    ]
    for component in meta.components:
        lines.append(f'        {ident[component.id]}["{_mermaid_label(component, opts)}"]')
    lines.append("    end")
    for ext in meta.externals:
        label = ext.label.replace('"', "&quot;")
        if ext.node_class is NodeClass.PERSON:
            lines.append(f'    {ident[ext.id]}(["{label}"])')
        else:
            lines.append(f'    {ident[ext.id]}[["{label}"]]')
    for relation in meta.relations:
        label = _relation_label(relation).replace("|", "/")
        lines.append(
            f"    {ident[relation.out]} -->|{label}| {ident[relation.in_]}"
        )
    lines.append("    %% legend")
    lines.append("    classDef component fill:#438dd5,stroke:#2e6295,color:#ffffff")
    lines.append("    classDef infrastructure fill:#85bbf0,stroke:#5d82a8,color:#000000")
    lines.append("    classDef person fill:#08427b,stroke:#052e56,color:#ffffff")
    lines.append("    classDef external fill:#999999,stroke:#6b6b6b,color:#ffffff")
    for component in meta.components:
        cls = (
            "infrastructure"
            if component.kind is ComponentKind.INFRASTRUCTURE
            else "component"
        )
        lines.append(f"    class {ident[component.id]} {cls}")
    for ext in meta.externals:
        cls = "person" if ext.node_class is NodeClass.PERSON else "external"
        lines.append(f"    class {ident[ext.id]} {cls}")
    return "\n".join(lines) + "\n"


def _dot_label(component: Component, opts: EmitOptions) -> str:
    parts = [component.name]
    if component.component_type:
        parts.append(component.component_type)
    image = component.artifacts.get("image")
    if image:
        parts.append(image)
    replicas = component.artifacts.get("replicas")
    if replicas is not None:
        parts.append(f"Replicas: {replicas}")
    if opts.include_properties:
        parts.extend(_property_lines(component))
    return "\\n".join(p.replace("\\", "\\\\").replace('"', '\\"') for p in parts)


def _emit_dot(meta: MetaDescriptor, opts: EmitOptions, ident: dict[str, str]) -> str:
    rankdir = "TB" if opts.orientation == "top-bottom" else "LR"
    lines = [
        _header("dot", opts),
        f"digraph {_q(opts.system_name)} {{",
        f"    rankdir={rankdir};",
        "    // legend: box=component, lighter box=infrastructure, ellipse=person, gray=external system",
        '    node [shape=box, style=filled, fillcolor="#438dd5", fontcolor="white"];',
    ]
    for component in meta.components:
        attrs = [f'label="{_dot_label(component, opts)}"']
        if component.kind is ComponentKind.INFRASTRUCTURE:
            attrs.insert(0, 'fillcolor="#85bbf0", fontcolor="black"')
        lines.append(f"    {ident[component.id]} [{', '.join(attrs)}];")
    for ext in meta.externals:
        label = ext.label.replace("\\", "\\\\").replace('"', '\\"')
        if ext.node_class is NodeClass.PERSON:
            lines.append(
                f'    {ident[ext.id]} [shape=ellipse, fillcolor="#08427b", label="{label}"];'
            )
        else:
            lines.append(
                f'    {ident[ext.id]} [fillcolor="#999999", label="{label}"];'
            )
    for relation in meta.relations:
        lines.append(
            f"    {ident[relation.out]} -> {ident[relation.in_]} "
            f'[label="{_relation_label(relation)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


_EMITTERS = {
    "structurizr": _emit_structurizr,
    "mermaid": _emit_mermaid,
    "dot": _emit_dot,
}


def emit(meta: MetaDescriptor, opts: EmitOptions, fmt: str) -> DacDocument:
    """Produce diagram-as-code text; same model + options => same bytes."""
    if fmt not in FORMATS:
        raise FormatUnknown(f"unknown diagram format {fmt!r}")
    report = validate(meta)
    if report.errors:
        first = report.errors[0]
        raise InvalidModel(f"cannot emit an invalid model: {first.message}")
    ident = sanitize_identifiers(meta)
    text = _EMITTERS[fmt](meta, opts, ident)
    return DacDocument(format=fmt, text=text, digest=text_digest(text), options_used=opts)


_NODE_RES = {
    "structurizr": re.compile(
        r"^\s*(?P<id>\w+) = (?:container|person|softwareSystem) "
    ),
    "mermaid": re.compile(r"^\s+(?P<id>\w+)(?:\[\[?\"|\(\[\")"),
    "dot": re.compile(r"^\s+(?P<id>\w+) \[.*label="),
}
_EDGE_RES = {
    "structurizr": re.compile(r'^\s*(?P<src>\w+) -> (?P<dst>\w+) "(?P<label>[^"]*)"$'),
    "mermaid": re.compile(r"^\s+(?P<src>\w+) -->\|(?P<label>[^|]*)\| (?P<dst>\w+)$"),
    "dot": re.compile(r'^\s+(?P<src>\w+) -> (?P<dst>\w+) \[label="(?P<label>[^"]*)"\];$'),
}


def extract_graph(text: str, fmt: str) -> tuple[tuple[str, ...], tuple[tuple[str, str, str], ...]]:
    """Grammar-aware node/edge extraction, used for counting and semantic compare."""
    if fmt not in FORMATS:
        raise FormatUnknown(f"unknown diagram format {fmt!r}")
    nodes: list[str] = []
    edges: list[tuple[str, str, str]] = []
    for line in text.splitlines():
        edge = _EDGE_RES[fmt].match(line)
        if edge:
            edges.append((edge["src"], edge["dst"], edge["label"]))
            continue
        node = _NODE_RES[fmt].match(line)
        if node:
            node_id = node["id"]
            if node_id in ("softwareSystem", "node"):
                continue
            nodes.append(node_id)
    return tuple(sorted(nodes)), tuple(sorted(edges))


def graph_digest(text: str, fmt: str) -> str:
    """Digest of the node/edge sets alone, for the semantic comparison mode."""
    nodes, edges = extract_graph(text, fmt)
    canon = "\n".join(nodes) + "\n--\n" + "\n".join(
        f"{src} -> {dst} [{label}]" for src, dst, label in edges
    )
    return text_digest(canon)
