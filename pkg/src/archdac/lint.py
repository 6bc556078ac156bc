"""Diagram quality guidelines.

G1  every element is clearly identified (non-empty component names)
G2  the notation is defined (document carries its styles/legend section)
G3  elements carry detail (a type or at least one property)
G4  the diagram has a reading start (annotated or uniquely inferable
    from dependency indegree)
G5  off-the-shelf technologies carry a known technology tag

Findings are data: deterministic, sorted by rule then subject.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import yamlio
from .backend import LEGEND_MARKERS, DacDocument
from .errors import SchemaError
from .meta_model import MetaDescriptor, RelationKind

# Image basename -> technology tag. Namespaced images (those with a '/')
# denote first-party application artifacts and are exempt from G5.
DEFAULT_TECH_TABLE: dict[str, str] = {
    "nginx": "web-proxy",
    "httpd": "web-server",
    "redis": "cache",
    "postgres": "database",
    "mysql": "database",
}


@dataclass(frozen=True)
class Finding:
    rule: str
    severity: str
    subject: str
    message: str

    def render(self) -> str:
        return f"{self.rule} {self.severity} {self.subject}: {self.message}"


def load_tech_table(path: str) -> dict[str, str]:
    """Read extra image->tag entries from a YAML mapping file."""
    with open(path, encoding="utf-8") as handle:
        data = yamlio.load_one(handle.read())
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: technology table must be a mapping")
    return {str(k): str(v) for k, v in data.items()}


def entrypoint_candidates(meta: MetaDescriptor) -> tuple[str, ...]:
    """Components no depends_on relation points at, sorted by id."""
    indegree = {c.id: 0 for c in meta.components}
    for relation in meta.relations:
        if relation.kind is RelationKind.DEPENDS_ON and relation.in_ in indegree:
            indegree[relation.in_] += 1
    return tuple(sorted(cid for cid, deg in indegree.items() if deg == 0))


def annotated_entrypoints(meta: MetaDescriptor) -> tuple[str, ...]:
    return tuple(
        c.id for c in meta.components if c.properties.get("x-entrypoint") is True
    )


def lint(
    meta: MetaDescriptor,
    dac: DacDocument | None = None,
    tech_table: dict[str, str] | None = None,
) -> list[Finding]:
    """Evaluate all guidelines; G2 is skipped (not passed) without a document."""
    table = dict(DEFAULT_TECH_TABLE)
    if tech_table:
        table.update(tech_table)
    findings: list[Finding] = []

    for component in meta.components:
        if not component.name.strip():
            findings.append(
                Finding("G1", "error", component.id, "component has no usable name")
            )

    if dac is not None and LEGEND_MARKERS[dac.format] not in dac.text:
        findings.append(
            Finding(
                "G2",
                "error",
                "document",
                f"{dac.format} document lacks its styles/legend section",
            )
        )

    for component in meta.components:
        if component.component_type is None and not component.properties:
            findings.append(
                Finding(
                    "G3",
                    "warning",
                    component.id,
                    "component has neither a type nor any property",
                )
            )

    if meta.components:
        annotated = annotated_entrypoints(meta)
        if not annotated:
            candidates = entrypoint_candidates(meta)
            if not candidates:
                findings.append(
                    Finding(
                        "G4",
                        "error",
                        "document",
                        "no entry point: every component has an incoming dependency",
                    )
                )
            elif len(candidates) > 1:
                findings.append(
                    Finding(
                        "G4",
                        "warning",
                        "document",
                        "ambiguous entry point: " + ", ".join(candidates),
                    )
                )

    for component in meta.components:
        image = component.artifacts.get("image")
        if not image:
            continue
        basename = image.split(":", 1)[0]
        if "/" in basename:
            continue
        if basename not in table:
            findings.append(
                Finding(
                    "G5",
                    "warning",
                    component.id,
                    f"no technology tag for image {image!r}",
                )
            )

    findings.sort(key=lambda f: (f.rule, f.subject, f.message))
    return findings


def findings_report(findings: list[Finding]) -> str:
    if not findings:
        return "no findings\n"
    return "\n".join(f.render() for f in findings) + "\n"


def findings_yaml(findings: list[Finding]) -> str:
    doc = {
        "findings": [
            {
                "rule": f.rule,
                "severity": f.severity,
                "subject": f.subject,
                "message": f.message,
            }
            for f in findings
        ]
    }
    return yamlio.dump_canonical(doc)
