"""Docker Compose frontend: services and their directives to the meta-descriptor.

Mapping rules:
  service           -> component (id and name = service name)
  container_name    -> component type
  ports "H:C"       -> property targetPort = C (host side dropped; ledgered
                       as unmapped only when it differs from C)
  volumes/expose/networks -> like-named properties
  image, else build -> artifacts.image (image wins when both are present)
  deploy.replicas   -> artifacts.replicas
  depends_on        -> depends_on relations
Environment variables are never copied; keys matching the secret pattern
are ledgered as redacted. Operational directives (restart, healthcheck,
logging) stay unmapped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import leafpaths, yamlio
from .errors import DependencyCycle, SchemaError, UnknownDependency
from .ledger import (
    REASON_ENVIRONMENT,
    REASON_HOST_PORT,
    REASON_OPERATIONAL,
    REASON_SECRET,
    CoverageLedger,
    LedgerBuilder,
)
from .meta_model import (
    Component,
    MetaDescriptor,
    Relation,
    SourceInfo,
    text_digest,
    validate,
)

SECRET_KEY_RE = re.compile(r"(password|secret|token|key)", re.IGNORECASE)
_PORT_RE = re.compile(r"^\d+(:\d+)?$")

# Directives with a dedicated mapping; anything else lands in ServiceDef.other.
_KNOWN_DIRECTIVES = frozenset(
    {
        "container_name",
        "image",
        "build",
        "ports",
        "expose",
        "volumes",
        "networks",
        "depends_on",
        "deploy",
        "environment",
    }
)
_OPERATIONAL_DIRECTIVES = frozenset({"restart", "healthcheck", "logging"})


@dataclass(frozen=True)
class ServiceDef:
    container_name: str | None = None
    image: str | None = None
    build: str | None = None
    ports: tuple[str, ...] = ()
    expose: tuple[int, ...] = ()
    volumes: tuple[str, ...] = ()
    networks: tuple[str, ...] = ()
    depends_on: tuple[str, ...] = ()
    deploy_replicas: int | None = None
    environment: dict[str, str] = field(default_factory=dict)
    other: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComposeModel:
    services: dict[str, ServiceDef]
    raw_paths: tuple[str, ...]
    raw: dict
    comments: tuple[tuple[int, str], ...]
    digest: str


def _normalize_port(value: object, path: str) -> str:
    """Reduce a ports entry to ``C`` or ``H:C``; reject anything else."""
    if isinstance(value, bool):
        raise SchemaError(f"{path}: invalid ports entry {value!r}")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, dict):
        target = value.get("target")
        if target is None:
            raise SchemaError(f"{path}: long-form ports entry needs 'target'")
        published = value.get("published")
        return f"{published}:{target}" if published is not None else str(target)
    if not isinstance(value, str):
        raise SchemaError(f"{path}: invalid ports entry {value!r}")
    text = value.split("/", 1)[0]  # drop protocol suffix
    parts = text.split(":")
    if len(parts) == 3:  # ip:host:container
        parts = parts[1:]
    normalized = ":".join(parts)
    if not _PORT_RE.match(normalized):
        raise SchemaError(f"{path}: cannot normalize ports entry {value!r}")
    return normalized


def _string_list(value: object, path: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list):
        raise SchemaError(f"{path}: expected a sequence")
    return tuple(str(item) for item in value)


def _parse_environment(value: object, path: str) -> dict[str, str]:
    if value is None:
        return {}
    if isinstance(value, dict):
        return {str(k): "" if v is None else str(v) for k, v in value.items()}
    if isinstance(value, list):
        env: dict[str, str] = {}
        for item in value:
            key, _, val = str(item).partition("=")
            env[key] = val
        return env
    raise SchemaError(f"{path}: expected a mapping or sequence")


def parse_compose(text: str) -> ComposeModel:
    """Parse a Compose document, recording every leaf path and comment line."""
    data = yamlio.load_one(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise SchemaError("top level must be a mapping")
    if "services" not in data:
        raise SchemaError("missing top-level 'services' key")
    raw_services = data.get("services") or {}
    if not isinstance(raw_services, dict):
        raise SchemaError("'services' must be a mapping")

    services: dict[str, ServiceDef] = {}
    for name, body in raw_services.items():
        name = str(name)
        path = f"services.{name}"
        body = body or {}
        if not isinstance(body, dict):
            raise SchemaError(f"{path}: service definition must be a mapping")

        build = body.get("build")
        if isinstance(build, dict):
            build_ref = build.get("context")
            build_ref = str(build_ref) if build_ref is not None else None
        elif build is not None:
            build_ref = str(build)
        else:
            build_ref = None

        depends = body.get("depends_on")
        if isinstance(depends, dict):
            depends_on = tuple(str(k) for k in depends)
        else:
            depends_on = _string_list(depends, f"{path}.depends_on")

        replicas = None
        deploy = body.get("deploy")
        if isinstance(deploy, dict) and "replicas" in deploy:
            try:
                replicas = int(deploy["replicas"])
            except (TypeError, ValueError):
                raise SchemaError(f"{path}.deploy.replicas: not an integer") from None
            if replicas < 1:
                raise SchemaError(f"{path}.deploy.replicas: must be positive")

        networks = body.get("networks")
        if isinstance(networks, dict):
            network_names = tuple(str(k) for k in networks)
        else:
            network_names = _string_list(networks, f"{path}.networks")

        services[name] = ServiceDef(
            container_name=body.get("container_name"),
            image=str(body["image"]) if body.get("image") is not None else None,
            build=build_ref,
            ports=tuple(
                _normalize_port(entry, f"{path}.ports[{i}]")
                for i, entry in enumerate(body.get("ports") or [])
            ),
            expose=tuple(int(e) for e in body.get("expose") or []),
            volumes=_string_list(body.get("volumes"), f"{path}.volumes"),
            networks=network_names,
            depends_on=depends_on,
            deploy_replicas=replicas,
            environment=_parse_environment(body.get("environment"), f"{path}.environment"),
            other=tuple(k for k in body if k not in _KNOWN_DIRECTIVES),
        )

    comments = tuple(
        (lineno, line)
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.lstrip().startswith("#")
    )
    return ComposeModel(
        services=services,
        raw_paths=tuple(leafpaths.iter_leaf_paths(data)),
        raw=data,
        comments=comments,
        digest=text_digest(text),
    )


def _container_side(entry: str) -> int:
    return int(entry.rsplit(":", 1)[-1])


def _claim_service_paths(
    builder: LedgerBuilder, name: str, body: dict, svc: ServiceDef
) -> None:
    base = f"services.{name}"
    for key, value in body.items():
        prefix = f"{base}.{key}"
        if key == "container_name":
            builder.mapped(prefix)
        elif key == "image":
            builder.mapped(prefix)
            if "${" in str(value):
                builder.note(f"{prefix}: variable interpolation left literal")
        elif key == "build":
            if isinstance(value, dict):
                if "context" in value:
                    builder.mapped(f"{prefix}.context")
                builder.unmapped_subtree(prefix, "build options")
            else:
                builder.mapped(prefix)
        elif key == "ports":
            for i, entry in enumerate(svc.ports):
                parts = entry.split(":")
                if len(parts) == 2 and parts[0] != parts[1]:
                    builder.unmapped(f"{prefix}[{i}]", REASON_HOST_PORT)
                else:
                    builder.mapped(f"{prefix}[{i}]")
        elif key in ("expose", "volumes"):
            for i in range(len(value or [])):
                builder.mapped(f"{prefix}[{i}]")
        elif key == "networks":
            if isinstance(value, dict):
                builder.unmapped_subtree(prefix, "network options")
            else:
                for i in range(len(value or [])):
                    builder.mapped(f"{prefix}[{i}]")
        elif key == "depends_on":
            if isinstance(value, dict):
                for dep, cond in value.items():
                    if cond is None:
                        builder.mapped(f"{prefix}.{dep}")
                    else:
                        builder.unmapped_subtree(f"{prefix}.{dep}", "depends_on condition")
            else:
                for i in range(len(value or [])):
                    builder.mapped(f"{prefix}[{i}]")
        elif key == "deploy":
            if isinstance(value, dict) and "replicas" in value:
                builder.mapped(f"{prefix}.replicas")
            builder.unmapped_subtree(prefix, "deploy options")
        elif key == "environment":
            if isinstance(value, dict):
                for env_key in value:
                    reason = REASON_SECRET if SECRET_KEY_RE.search(str(env_key)) else REASON_ENVIRONMENT
                    builder.unmapped(f"{prefix}.{env_key}", reason)
            else:
                for i, item in enumerate(value or []):
                    env_key = str(item).partition("=")[0]
                    reason = REASON_SECRET if SECRET_KEY_RE.search(env_key) else REASON_ENVIRONMENT
                    builder.unmapped(f"{prefix}[{i}]", reason)
        elif key in _OPERATIONAL_DIRECTIVES:
            builder.unmapped_subtree(prefix, REASON_OPERATIONAL)
        elif str(key).startswith("x-") and not isinstance(value, dict):
            if isinstance(value, list):
                for i in range(len(value)):
                    builder.mapped(f"{prefix}[{i}]")
            else:
                builder.mapped(prefix)


def compose_to_meta(model: ComposeModel) -> tuple[MetaDescriptor, CoverageLedger]:
    """Walk every service, building components, relations, and the ledger."""
    builder = LedgerBuilder(model.raw_paths)
    components: list[Component] = []
    relations: list[Relation] = []

    for name, svc in model.services.items():
        body = model.raw["services"].get(name) or {}

        properties: dict[str, object] = {}
        if svc.volumes:
            properties["volumes"] = svc.volumes
        if svc.ports:
            targets = tuple(_container_side(entry) for entry in svc.ports)
            properties["targetPort"] = targets[0] if len(targets) == 1 else targets
        if svc.expose:
            properties["expose"] = svc.expose[0] if len(svc.expose) == 1 else svc.expose
        if svc.networks:
            properties["networks"] = svc.networks
        for key, value in body.items():
            if str(key).startswith("x-") and not isinstance(value, dict):
                properties[str(key)] = tuple(value) if isinstance(value, list) else value

        artifacts: dict[str, str] = {}
        if svc.image is not None:
            artifacts["image"] = svc.image
        elif svc.build is not None:
            artifacts["image"] = svc.build
        else:
            builder.note(f"services.{name}: no artifact source (neither image nor build)")
        if svc.deploy_replicas is not None:
            artifacts["replicas"] = str(svc.deploy_replicas)

        components.append(
            Component(
                id=name,
                name=name,
                component_type=svc.container_name,
                properties=properties,
                artifacts=artifacts,
            )
        )

        for dep in svc.depends_on:
            if dep not in model.services:
                raise UnknownDependency(
                    f"service {name!r} depends on unknown service {dep!r}"
                )
            relations.append(Relation(out=name, in_=dep))

        _claim_service_paths(builder, name, body, svc)

    for key in model.raw:
        if key == "services":
            continue
        reason = "format metadata" if key == "version" else "top-level declaration"
        builder.unmapped_subtree(str(key), reason)

    meta = MetaDescriptor(
        components=tuple(components),
        relations=tuple(relations),
        source=SourceInfo("compose", model.digest),
    )
    for finding in validate(meta).errors:
        if finding.code == "cycle":
            raise DependencyCycle(finding.message)
    return meta, builder.build()
