"""End-to-end plumbing: detect the frontend, build the annotated model.

Frontend detection: a ``.tf.json`` suffix selects Terraform; otherwise the
YAML is inspected — documents with apiVersion+kind are Kubernetes
manifests, a mapping with a top-level ``services`` key is Compose.
Annotations are gathered from the descriptor's own comment lines plus an
optional sidecar file (``<descriptor>.arch`` by default), which is the
only channel for JSON inputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import compose, kubernetes, terraform, yamlio
from .annotations import Annotation, apply_annotations, extract_annotations
from .errors import SchemaError
from .ledger import CoverageLedger
from .meta_model import MetaDescriptor

FRONTENDS = ("compose", "kubernetes", "terraform")


@dataclass(frozen=True)
class PipelineResult:
    meta: MetaDescriptor
    ledger: CoverageLedger
    frontend: str
    raw_paths: tuple[str, ...]
    annotations: tuple[Annotation, ...]


def detect_frontend(path: str, text: str) -> str:
    if path.endswith(".tf.json"):
        return "terraform"
    docs = yamlio.load_all(text)
    if any(isinstance(d, dict) and "apiVersion" in d and "kind" in d for d in docs):
        return "kubernetes"
    if len(docs) <= 1 and (not docs or isinstance(docs[0], dict)):
        if docs and "services" in docs[0]:
            return "compose"
        if not docs:
            raise SchemaError(f"{path}: empty descriptor, cannot detect a frontend")
    raise SchemaError(f"{path}: does not look like Compose, Kubernetes, or Terraform JSON")


def _convert(frontend: str, text: str) -> tuple[MetaDescriptor, CoverageLedger, tuple[str, ...]]:
    if frontend == "compose":
        model = compose.parse_compose(text)
        meta, ledger = compose.compose_to_meta(model)
        return meta, ledger, model.raw_paths
    if frontend == "kubernetes":
        model = kubernetes.parse_manifests(text)
        meta, ledger = kubernetes.k8s_to_meta(model)
        return meta, ledger, model.raw_paths
    if frontend == "terraform":
        model = terraform.parse_tf_json(text)
        meta, ledger = terraform.tf_to_meta(model)
        return meta, ledger, model.raw_paths
    raise SchemaError(f"unknown frontend {frontend!r}")


def gather_annotations(path: str, text: str, sidecar: str | None = None) -> list[Annotation]:
    annotations: list[Annotation] = []
    if not path.endswith(".json"):
        annotations.extend(extract_annotations(text))
    sidecar_path = sidecar if sidecar is not None else f"{path}.arch"
    if os.path.exists(sidecar_path):
        with open(sidecar_path, encoding="utf-8") as handle:
            annotations.extend(extract_annotations(handle.read()))
    return annotations


def load_descriptor(
    path: str,
    frontend: str | None = None,
    annotations_path: str | None = None,
) -> PipelineResult:
    """Read, detect, parse, convert, and annotate one descriptor file."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    chosen = frontend or detect_frontend(path, text)
    if chosen not in FRONTENDS:
        raise SchemaError(f"unknown frontend {chosen!r}")
    meta, ledger, raw_paths = _convert(chosen, text)
    annotations = gather_annotations(path, text, annotations_path)
    meta, maybe_ledger = apply_annotations(meta, annotations, ledger)
    assert maybe_ledger is not None
    return PipelineResult(
        meta=meta,
        ledger=maybe_ledger,
        frontend=chosen,
        raw_paths=raw_paths,
        annotations=tuple(annotations),
    )
