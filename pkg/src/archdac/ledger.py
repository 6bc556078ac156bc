"""Coverage accounting: which source leaves the mapping consumed.

Every leaf path of a descriptor lands in exactly one of three sets:
mapped (represented in the meta-descriptor), unmapped (dropped, with a
reason), or ignored (excluded by annotation). Free-form notes record
facts that have no leaf to anchor to, such as a service with no artifact
source.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from . import yamlio
from .errors import UnknownTarget

REASON_SECRET = "redacted-secret"
REASON_OPERATIONAL = "operational detail"
REASON_ENVIRONMENT = "environment variable"
REASON_HOST_PORT = "host port differs from container port; only the container side is mapped"
REASON_EXPRESSION = "expression reference left unevaluated"
REASON_UNRECOGNIZED = "unrecognized element"


@dataclass(frozen=True)
class UnmappedLeaf:
    path: str
    reason: str


@dataclass(frozen=True)
class CoverageLedger:
    mapped: tuple[str, ...] = ()
    unmapped: tuple[UnmappedLeaf, ...] = ()
    ignored: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapped", tuple(sorted(self.mapped)))
        object.__setattr__(
            self, "unmapped", tuple(sorted(self.unmapped, key=lambda u: u.path))
        )
        object.__setattr__(self, "ignored", tuple(sorted(self.ignored)))
        object.__setattr__(self, "notes", tuple(self.notes))

    @property
    def all_paths(self) -> frozenset[str]:
        return (
            frozenset(self.mapped)
            | frozenset(u.path for u in self.unmapped)
            | frozenset(self.ignored)
        )

    def unmapped_reason(self, path: str) -> str | None:
        for leaf in self.unmapped:
            if leaf.path == path:
                return leaf.reason
        return None

    def check_partition(self, raw_paths: Iterable[str]) -> None:
        """Raise unless mapped/unmapped/ignored partition ``raw_paths`` exactly."""
        mapped = frozenset(self.mapped)
        unmapped = frozenset(u.path for u in self.unmapped)
        ignored = frozenset(self.ignored)
        overlap = (mapped & unmapped) | (mapped & ignored) | (unmapped & ignored)
        if overlap:
            raise ValueError(f"ledger sets overlap on {sorted(overlap)[:3]}")
        expected = frozenset(raw_paths)
        union = mapped | unmapped | ignored
        if union != expected:
            missing = sorted(expected - union)[:3]
            extra = sorted(union - expected)[:3]
            raise ValueError(
                f"ledger does not partition the source: missing={missing} extra={extra}"
            )

    def with_ignored(self, path: str) -> CoverageLedger:
        """Move one leaf into the ignored set; unknown paths are an error."""
        if path in self.ignored:
            return self
        if path in self.mapped:
            return replace(
                self,
                mapped=tuple(p for p in self.mapped if p != path),
                ignored=self.ignored + (path,),
            )
        if any(u.path == path for u in self.unmapped):
            return replace(
                self,
                unmapped=tuple(u for u in self.unmapped if u.path != path),
                ignored=self.ignored + (path,),
            )
        raise UnknownTarget(f"ignore target {path!r} is not a leaf path of the source")

    def to_report_yaml(self) -> str:
        doc = {
            "mapped": list(self.mapped),
            "unmapped": [{"path": u.path, "reason": u.reason} for u in self.unmapped],
            "ignored": list(self.ignored),
        }
        if self.notes:
            doc["notes"] = list(self.notes)
        return yamlio.dump_canonical(doc)


class LedgerBuilder:
    """Mutable accumulator frontends use while walking a descriptor."""

    def __init__(self, raw_paths: Iterable[str]) -> None:
        self._raw = list(raw_paths)
        self._claims: dict[str, tuple[str, str | None]] = {}
        self._notes: list[str] = []
        raw_set = set(self._raw)
        if len(raw_set) != len(self._raw):
            raise ValueError("duplicate leaf paths in source enumeration")
        self._raw_set = raw_set

    def _claim(self, path: str, kind: str, reason: str | None) -> None:
        if path not in self._raw_set:
            raise ValueError(f"claimed path {path!r} is not a source leaf")
        previous = self._claims.get(path)
        if previous is not None and previous != (kind, reason):
            raise ValueError(f"path {path!r} claimed twice: {previous} vs {(kind, reason)}")
        self._claims[path] = (kind, reason)

    def mapped(self, path: str) -> None:
        self._claim(path, "mapped", None)

    def unmapped(self, path: str, reason: str) -> None:
        self._claim(path, "unmapped", reason)

    def unmapped_subtree(self, prefix: str, reason: str) -> None:
        """Mark every still-unclaimed leaf under ``prefix`` as unmapped.

        An empty prefix covers the whole document.
        """
        for path in self._raw:
            if not prefix or path == prefix or path.startswith((prefix + ".", prefix + "[")):
                if path not in self._claims:
                    self._claim(path, "unmapped", reason)

    def note(self, message: str) -> None:
        self._notes.append(message)

    def build(self, default_reason: str = REASON_UNRECOGNIZED) -> CoverageLedger:
        mapped: list[str] = []
        unmapped: list[UnmappedLeaf] = []
        for path in self._raw:
            kind, reason = self._claims.get(path, ("unmapped", default_reason))
            if kind == "mapped":
                mapped.append(path)
            else:
                unmapped.append(UnmappedLeaf(path, reason or default_reason))
        ledger = CoverageLedger(
            mapped=tuple(mapped), unmapped=tuple(unmapped), notes=tuple(self._notes)
        )
        ledger.check_partition(self._raw)
        return ledger
