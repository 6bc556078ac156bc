"""Terraform (JSON syntax) frontend.

Resources and modules become components (ids ``<type>.<name>`` and
``module.<name>``); the provider is read lexically from the resource type
prefix. Only explicit depends_on entries produce relations — ``${...}``
expression references are kept opaque and ledgered. A depends_on entry of
the form ``data.<type>.<name>`` attaches that data source as a component
property instead of creating a relation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import leafpaths
from .errors import DependencyCycle, ParseError, SchemaError, UnknownDependency
from .ledger import REASON_EXPRESSION, CoverageLedger, LedgerBuilder
from .meta_model import (
    Component,
    MetaDescriptor,
    Relation,
    SourceInfo,
    text_digest,
    validate,
)


@dataclass(frozen=True)
class TfResource:
    resource_type: str
    name: str
    depends_on: tuple[str, ...] = ()
    arguments: dict = field(default_factory=dict)

    @property
    def component_id(self) -> str:
        return f"{self.resource_type}.{self.name}"

    @property
    def provider(self) -> str:
        return self.resource_type.split("_", 1)[0]


@dataclass(frozen=True)
class TfModule:
    name: str
    source: str | None = None
    depends_on: tuple[str, ...] = ()
    arguments: dict = field(default_factory=dict)

    @property
    def component_id(self) -> str:
        return f"module.{self.name}"


@dataclass(frozen=True)
class TfDataSource:
    data_type: str
    name: str

    @property
    def ref(self) -> str:
        return f"data.{self.data_type}.{self.name}"


@dataclass(frozen=True)
class TfModel:
    resources: tuple[TfResource, ...] = ()
    modules: tuple[TfModule, ...] = ()
    data_sources: tuple[TfDataSource, ...] = ()
    raw_paths: tuple[str, ...] = ()
    raw: dict = field(default_factory=dict)
    digest: str = ""


def _depends_list(body: dict, path: str) -> tuple[str, ...]:
    raw = body.get("depends_on")
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise SchemaError(f"{path}.depends_on: expected a sequence")
    return tuple(str(entry) for entry in raw)


def parse_tf_json(text: str) -> TfModel:
    """Parse Terraform JSON configuration; unknown blocks stay coverage-only."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise SchemaError("top level must be a JSON object")

    resources: list[TfResource] = []
    seen: set[tuple[str, str]] = set()
    for rtype, names in (data.get("resource") or {}).items():
        if not isinstance(names, dict):
            raise SchemaError(f"resource.{rtype}: expected an object of named blocks")
        for name, body in names.items():
            if not isinstance(body, dict):
                raise SchemaError(f"resource.{rtype}.{name}: expected an object")
            key = (str(rtype), str(name))
            if key in seen:
                raise SchemaError(f"resource.{rtype}.{name}: duplicate resource")
            seen.add(key)
            resources.append(
                TfResource(
                    resource_type=str(rtype),
                    name=str(name),
                    depends_on=_depends_list(body, f"resource.{rtype}.{name}"),
                    arguments=body,
                )
            )

    modules: list[TfModule] = []
    for name, body in (data.get("module") or {}).items():
        if not isinstance(body, dict):
            raise SchemaError(f"module.{name}: expected an object")
        source = body.get("source")
        modules.append(
            TfModule(
                name=str(name),
                source=str(source) if source is not None else None,
                depends_on=_depends_list(body, f"module.{name}"),
                arguments=body,
            )
        )

    data_sources: list[TfDataSource] = []
    for dtype, names in (data.get("data") or {}).items():
        if not isinstance(names, dict):
            raise SchemaError(f"data.{dtype}: expected an object of named blocks")
        for name in names:
            data_sources.append(TfDataSource(data_type=str(dtype), name=str(name)))

    return TfModel(
        resources=tuple(resources),
        modules=tuple(modules),
        data_sources=tuple(data_sources),
        raw_paths=tuple(leafpaths.iter_leaf_paths(data)),
        raw=data,
        digest=text_digest(text),
    )


def _claim_arguments(builder: LedgerBuilder, base: str, arguments: dict) -> None:
    for key, value in arguments.items():
        prefix = f"{base}.{key}"
        if key == "depends_on":
            for i in range(len(value or [])):
                builder.mapped(f"{prefix}[{i}]")
        elif isinstance(value, str) and "${" in value:
            builder.unmapped(prefix, REASON_EXPRESSION)
        else:
            builder.unmapped_subtree(prefix, "resource argument")


def tf_to_meta(model: TfModel) -> tuple[MetaDescriptor, CoverageLedger]:
    builder = LedgerBuilder(model.raw_paths)
    known_data = {d.ref for d in model.data_sources}
    component_ids = {r.component_id for r in model.resources} | {
        m.component_id for m in model.modules
    }

    components: list[Component] = []
    relations: list[Relation] = []

    def link(owner_id: str, entries: tuple[str, ...], properties: dict) -> None:
        data_refs = []
        for dep in entries:
            if dep.startswith("data."):
                if dep not in known_data:
                    raise UnknownDependency(
                        f"{owner_id} depends on unknown data source {dep!r}"
                    )
                data_refs.append(dep)
            elif dep in component_ids:
                relations.append(Relation(out=owner_id, in_=dep))
            else:
                raise UnknownDependency(f"{owner_id} depends on unknown target {dep!r}")
        if data_refs:
            properties["data_source"] = (
                data_refs[0] if len(data_refs) == 1 else tuple(data_refs)
            )

    for resource in model.resources:
        properties: dict[str, object] = {}
        link(resource.component_id, resource.depends_on, properties)
        components.append(
            Component(
                id=resource.component_id,
                name=resource.name,
                component_type=resource.resource_type,
                properties=properties,
                artifacts={"provider": resource.provider},
            )
        )
        _claim_arguments(
            builder,
            f"resource.{resource.resource_type}.{resource.name}",
            resource.arguments,
        )

    for module in model.modules:
        properties = {}
        link(module.component_id, module.depends_on, properties)
        artifacts = {"source": module.source} if module.source is not None else {}
        components.append(
            Component(
                id=module.component_id,
                name=module.name,
                properties=properties,
                artifacts=artifacts,
            )
        )
        base = f"module.{module.name}"
        if module.source is not None:
            builder.mapped(f"{base}.source")
        for key, value in module.arguments.items():
            if key == "source":
                continue
            prefix = f"{base}.{key}"
            if key == "depends_on":
                for i in range(len(value or [])):
                    builder.mapped(f"{prefix}[{i}]")
            elif isinstance(value, str) and "${" in value:
                builder.unmapped(prefix, REASON_EXPRESSION)
            else:
                builder.unmapped_subtree(prefix, "module argument")

    for data_source in model.data_sources:
        builder.unmapped_subtree(
            f"data.{data_source.data_type}.{data_source.name}",
            "data source configuration",
        )

    _BLOCK_REASONS = {
        "provider": "provider configuration",
        "variable": "input variable declaration",
        "output": "output declaration",
        "terraform": "terraform settings",
        "locals": "local value",
    }
    for key in model.raw:
        if key in ("resource", "module", "data"):
            continue
        builder.unmapped_subtree(str(key), _BLOCK_REASONS.get(str(key), "configuration block"))

    meta = MetaDescriptor(
        components=tuple(components),
        relations=tuple(relations),
        source=SourceInfo("terraform", model.digest),
    )
    for finding in validate(meta).errors:
        if finding.code == "cycle":
            raise DependencyCycle(finding.message)
    return meta, builder.build(default_reason="configuration detail")
