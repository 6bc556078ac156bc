"""archdac: DevOps descriptors -> canonical meta-descriptor -> diagram as code."""

from .annotations import Annotation, apply_annotations, extract_annotations
from .backend import DacDocument, EmitOptions, emit, extract_graph
from .compose import ComposeModel, ServiceDef, compose_to_meta, parse_compose
from .consistency import ConsistencyVerdict, check, coverage
from .errors import (
    AnnotationError,
    ArchdacError,
    DependencyCycle,
    FormatUnknown,
    InvalidModel,
    ParseError,
    SchemaError,
    UnknownDependency,
    UnknownTarget,
)
from .kubernetes import K8sModel, K8sObject, k8s_to_meta, parse_manifests
from .ledger import CoverageLedger, LedgerBuilder, UnmappedLeaf
from .lint import Finding, lint
from .meta_model import (
    Component,
    ComponentKind,
    ExternalNode,
    MetaDescriptor,
    NodeClass,
    Relation,
    RelationKind,
    RelationOrigin,
    SourceInfo,
    ValidationReport,
    deserialize,
    serialize_canonical,
    validate,
)
from .pipeline import PipelineResult, detect_frontend, load_descriptor
from .terraform import TfModel, parse_tf_json, tf_to_meta

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "AnnotationError",
    "ArchdacError",
    "Component",
    "ComponentKind",
    "ComposeModel",
    "ConsistencyVerdict",
    "CoverageLedger",
    "DacDocument",
    "DependencyCycle",
    "EmitOptions",
    "ExternalNode",
    "Finding",
    "FormatUnknown",
    "InvalidModel",
    "K8sModel",
    "K8sObject",
    "LedgerBuilder",
    "MetaDescriptor",
    "NodeClass",
    "ParseError",
    "PipelineResult",
    "Relation",
    "RelationKind",
    "RelationOrigin",
    "SchemaError",
    "ServiceDef",
    "SourceInfo",
    "TfModel",
    "UnknownDependency",
    "UnknownTarget",
    "UnmappedLeaf",
    "ValidationReport",
    "apply_annotations",
    "check",
    "compose_to_meta",
    "coverage",
    "deserialize",
    "detect_frontend",
    "emit",
    "extract_annotations",
    "extract_graph",
    "k8s_to_meta",
    "lint",
    "load_descriptor",
    "parse_compose",
    "parse_manifests",
    "parse_tf_json",
    "serialize_canonical",
    "tf_to_meta",
    "validate",
]
