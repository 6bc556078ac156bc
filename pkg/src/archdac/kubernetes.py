"""Kubernetes frontend: Pods, Deployments, and Services to the meta-descriptor.

Pods and Deployments become deployable components: the ``role`` label (or
``app.kubernetes.io/component`` as fallback) supplies the type, the first
container supplies the image and targetPort, Deployment replicas become an
artifact. Services become infrastructure components whose selector yields
``exposes`` relations. Manifests carry no dependency vocabulary, so no
depends_on relation is ever synthesized here; those come from annotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import leafpaths, yamlio
from .errors import SchemaError
from .ledger import REASON_SECRET, CoverageLedger, LedgerBuilder
from .meta_model import (
    Component,
    ComponentKind,
    MetaDescriptor,
    Relation,
    RelationKind,
    SourceInfo,
    text_digest,
)
from .compose import SECRET_KEY_RE

_MAPPED_KINDS = frozenset({"Pod", "Deployment", "Service"})


@dataclass(frozen=True)
class ContainerSpec:
    name: str
    image: str | None
    ports: tuple[int, ...]


@dataclass(frozen=True)
class K8sObject:
    kind: str
    name: str
    namespace: str | None = None
    labels: dict[str, str] = field(default_factory=dict)
    containers: tuple[ContainerSpec, ...] = ()
    replicas: int | None = None
    selector: dict[str, str] | None = None
    svc_ports: tuple[tuple[int, int | None], ...] = ()
    prefix: str = ""
    raw: dict = field(default_factory=dict)

    @property
    def component_id(self) -> str:
        return f"{self.namespace}.{self.name}" if self.namespace else self.name


@dataclass(frozen=True)
class K8sModel:
    objects: tuple[K8sObject, ...]
    raw_paths: tuple[str, ...]
    digest: str


def _containers_of(doc: dict, kind: str) -> tuple[tuple[ContainerSpec, ...], str]:
    """Containers plus the leaf-path stem they live under."""
    if kind == "Deployment":
        spec = ((doc.get("spec") or {}).get("template") or {}).get("spec") or {}
        stem = "spec.template.spec.containers"
    else:
        spec = doc.get("spec") or {}
        stem = "spec.containers"
    containers = []
    for entry in spec.get("containers") or []:
        entry = entry or {}
        ports = tuple(
            int(p["containerPort"])
            for p in entry.get("ports") or []
            if isinstance(p, dict) and "containerPort" in p
        )
        containers.append(
            ContainerSpec(
                name=str(entry.get("name", "")),
                image=str(entry["image"]) if entry.get("image") is not None else None,
                ports=ports,
            )
        )
    return tuple(containers), stem


def parse_manifests(text: str) -> K8sModel:
    """Parse a ``---``-separated manifest stream; unknown kinds are retained."""
    docs = yamlio.load_all(text)
    multi = len(docs) > 1
    objects: list[K8sObject] = []
    seen: set[tuple[str, str]] = set()

    for index, doc in enumerate(docs):
        where = f"document {index}"
        if not isinstance(doc, dict):
            raise SchemaError(f"{where}: expected a mapping")
        if "apiVersion" not in doc or "kind" not in doc:
            raise SchemaError(f"{where}: missing apiVersion or kind")
        metadata = doc.get("metadata") or {}
        name = metadata.get("name")
        if not name:
            raise SchemaError(f"{where}: missing metadata.name")
        kind = str(doc["kind"])
        key = (kind, str(name))
        if key in seen:
            raise SchemaError(f"{where}: duplicate object {kind}/{name}")
        seen.add(key)

        labels = {str(k): str(v) for k, v in (metadata.get("labels") or {}).items()}
        replicas = None
        selector: dict[str, str] | None = None
        svc_ports: tuple[tuple[int, int | None], ...] = ()
        if kind == "Deployment":
            spec = doc.get("spec") or {}
            if "replicas" in spec:
                replicas = int(spec["replicas"])
            template_meta = ((spec.get("template") or {}).get("metadata") or {})
            for k, v in (template_meta.get("labels") or {}).items():
                labels[str(k)] = str(v)
        elif kind == "Service":
            spec = doc.get("spec") or {}
            raw_selector = spec.get("selector")
            if isinstance(raw_selector, dict):
                selector = {str(k): str(v) for k, v in raw_selector.items()}
            ports = []
            for entry in spec.get("ports") or []:
                if isinstance(entry, dict) and "port" in entry:
                    target = entry.get("targetPort")
                    ports.append(
                        (int(entry["port"]), int(target) if isinstance(target, int) else None)
                    )
            svc_ports = tuple(ports)

        containers, _ = _containers_of(doc, kind)
        objects.append(
            K8sObject(
                kind=kind,
                name=str(name),
                namespace=str(metadata["namespace"]) if metadata.get("namespace") else None,
                labels=labels,
                containers=containers,
                replicas=replicas,
                selector=selector,
                svc_ports=svc_ports,
                prefix=f"doc[{index}]." if multi else "",
                raw=doc,
            )
        )

    return K8sModel(
        objects=tuple(objects),
        raw_paths=tuple(leafpaths.yaml_stream_paths(text)),
        digest=text_digest(text),
    )


def _claim_metadata(builder: LedgerBuilder, obj: K8sObject) -> None:
    base = obj.prefix
    builder.mapped(f"{base}apiVersion")
    builder.mapped(f"{base}kind")
    builder.mapped(f"{base}metadata.name")
    if obj.raw.get("metadata", {}).get("namespace"):
        builder.mapped(f"{base}metadata.namespace")
    for key in (obj.raw.get("metadata") or {}).get("labels") or {}:
        builder.mapped(f"{base}metadata.labels.{key}")


def _claim_container(
    builder: LedgerBuilder, stem: str, index: int, entry: dict, primary: bool
) -> None:
    base = f"{stem}[{index}]"
    for key, value in (entry or {}).items():
        if key == "name":
            builder.mapped(f"{base}.name")
        elif key == "image" and primary:
            builder.mapped(f"{base}.image")
        elif key == "ports" and primary:
            for i, port in enumerate(value or []):
                if isinstance(port, dict):
                    for pkey in port:
                        if pkey == "containerPort":
                            builder.mapped(f"{base}.ports[{i}].containerPort")
                        else:
                            builder.unmapped(f"{base}.ports[{i}].{pkey}", "container port detail")
        elif key == "env":
            for i, env in enumerate(value or []):
                env_name = str(env.get("name", "")) if isinstance(env, dict) else ""
                reason = REASON_SECRET if SECRET_KEY_RE.search(env_name) else "environment variable"
                builder.unmapped_subtree(f"{base}.env[{i}]", reason)
        else:
            reason = "sidecar container detail" if not primary else "container detail"
            builder.unmapped_subtree(f"{base}.{key}", reason)


def _selects(selector: dict[str, str], labels: dict[str, str]) -> bool:
    return all(labels.get(key) == value for key, value in selector.items())


def k8s_to_meta(model: K8sModel) -> tuple[MetaDescriptor, CoverageLedger]:
    builder = LedgerBuilder(model.raw_paths)
    components: list[Component] = []
    relations: list[Relation] = []
    workload_ids: dict[str, K8sObject] = {}

    for obj in model.objects:
        if obj.kind not in _MAPPED_KINDS:
            builder.note(f"{obj.kind}/{obj.name}: unsupported kind, retained for coverage only")
            builder.unmapped_subtree(obj.prefix.rstrip("."), f"unsupported kind {obj.kind}")
            continue
        if obj.kind in ("Pod", "Deployment"):
            workload_ids[obj.component_id] = obj

    taken = {obj.component_id for obj in model.objects if obj.kind in ("Pod", "Deployment")}

    for obj in model.objects:
        if obj.kind not in _MAPPED_KINDS:
            continue
        _claim_metadata(builder, obj)

        if obj.kind in ("Pod", "Deployment"):
            comp_type = obj.labels.get("role") or obj.labels.get(
                "app.kubernetes.io/component"
            )
            properties: dict[str, object] = {}
            artifacts: dict[str, str] = {}
            if obj.containers:
                first = obj.containers[0]
                if first.image:
                    artifacts["image"] = first.image
                if first.ports:
                    properties["targetPort"] = (
                        first.ports[0] if len(first.ports) == 1 else first.ports
                    )
                sidecars = tuple(c.name for c in obj.containers[1:] if c.name)
                if sidecars:
                    properties["sidecars"] = sidecars
            if obj.replicas is not None:
                artifacts["replicas"] = str(obj.replicas)
                builder.mapped(f"{obj.prefix}spec.replicas")

            components.append(
                Component(
                    id=obj.component_id,
                    name=obj.name,
                    component_type=comp_type,
                    properties=properties,
                    artifacts=artifacts,
                )
            )

            # Claim container leaves; Deployment template labels were merged above.
            if obj.kind == "Deployment":
                template_meta = ((obj.raw.get("spec") or {}).get("template") or {}).get("metadata") or {}
                for key in template_meta.get("labels") or {}:
                    builder.mapped(f"{obj.prefix}spec.template.metadata.labels.{key}")
            raw_containers, stem = _containers_list(obj)
            for i, entry in enumerate(raw_containers):
                _claim_container(builder, f"{obj.prefix}{stem}", i, entry, primary=(i == 0))

        elif obj.kind == "Service":
            svc_id = obj.component_id
            if svc_id in taken:
                svc_id = f"{svc_id}.svc"
                builder.note(
                    f"Service/{obj.name}: id collides with a workload; using {svc_id!r}"
                )
            properties = {}
            if obj.svc_ports:
                ports = tuple(p for p, _ in obj.svc_ports)
                properties["port"] = ports[0] if len(ports) == 1 else ports
                targets = tuple(t for _, t in obj.svc_ports if t is not None)
                if targets:
                    properties["targetPort"] = targets[0] if len(targets) == 1 else targets
            components.append(
                Component(
                    id=svc_id,
                    name=obj.name,
                    kind=ComponentKind.INFRASTRUCTURE,
                    properties=properties,
                )
            )
            matched = False
            if obj.selector:
                for key in obj.selector:
                    builder.mapped(f"{obj.prefix}spec.selector.{key}")
                for target_id, workload in workload_ids.items():
                    if _selects(obj.selector, workload.labels):
                        matched = True
                        relations.append(
                            Relation(out=svc_id, in_=target_id, kind=RelationKind.EXPOSES)
                        )
            if obj.selector is not None and not matched:
                builder.note(f"Service/{obj.name}: selector matched no component")
            for i, entry in enumerate((obj.raw.get("spec") or {}).get("ports") or []):
                if isinstance(entry, dict):
                    for pkey in entry:
                        path = f"{obj.prefix}spec.ports[{i}].{pkey}"
                        if pkey in ("port", "targetPort"):
                            builder.mapped(path)
                        else:
                            builder.unmapped(path, "service port detail")

    meta = MetaDescriptor(
        components=tuple(components),
        relations=tuple(relations),
        source=SourceInfo("kubernetes", model.digest),
    )
    return meta, builder.build(default_reason="manifest detail")


def _containers_list(obj: K8sObject) -> tuple[list, str]:
    if obj.kind == "Deployment":
        spec = ((obj.raw.get("spec") or {}).get("template") or {}).get("spec") or {}
        return list(spec.get("containers") or []), "spec.template.spec.containers"
    spec = obj.raw.get("spec") or {}
    return list(spec.get("containers") or []), "spec.containers"
