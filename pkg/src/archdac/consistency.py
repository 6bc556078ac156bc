"""Recompute-and-compare consistency checking plus coverage reporting.

A stored diagram is consistent with a descriptor exactly when re-running
the transformation reproduces it byte for byte. The semantic mode relaxes
the comparison to the extracted node/edge sets, for diagrams whose layout
was hand-edited; its digests are computed over those sets so the
verdict's digest-equality invariant still holds.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import backend
from .errors import FormatUnknown
from .ledger import CoverageLedger
from .meta_model import text_digest
from .pipeline import load_descriptor

__all__ = ["ConsistencyVerdict", "CoverageLedger", "check", "coverage"]


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    expected_digest: str
    actual_digest: str
    first_divergence: int | None = None


def _first_divergence(expected: str, actual: str) -> int | None:
    expected_lines = expected.splitlines()
    actual_lines = actual.splitlines()
    for index, (left, right) in enumerate(zip(expected_lines, actual_lines), start=1):
        if left != right:
            return index
    if len(expected_lines) != len(actual_lines):
        return min(len(expected_lines), len(actual_lines)) + 1
    return None


def check(
    descriptor_path: str,
    diagram_path: str,
    fmt: str | None = None,
    opts: backend.EmitOptions | None = None,
    frontend: str | None = None,
    annotations_path: str | None = None,
    semantic: bool = False,
) -> ConsistencyVerdict:
    """Recompute the diagram from the descriptor and compare with the stored one."""
    with open(diagram_path, encoding="utf-8") as handle:
        actual_text = handle.read()

    try:
        header_fmt, header_opts = backend.parse_header(actual_text)
    except FormatUnknown:
        if fmt is None:
            raise
        header_fmt, header_opts = fmt, opts or backend.EmitOptions()
    if fmt is not None and fmt != header_fmt:
        raise FormatUnknown(
            f"diagram header says {header_fmt!r} but {fmt!r} was requested"
        )
    use_opts = opts or header_opts

    result = load_descriptor(descriptor_path, frontend=frontend, annotations_path=annotations_path)
    expected = backend.emit(result.meta, use_opts, header_fmt)

    if semantic:
        expected_digest = backend.graph_digest(expected.text, header_fmt)
        actual_digest = backend.graph_digest(actual_text, header_fmt)
        return ConsistencyVerdict(
            consistent=expected_digest == actual_digest,
            expected_digest=expected_digest,
            actual_digest=actual_digest,
        )

    actual_digest = text_digest(actual_text)
    consistent = expected.digest == actual_digest
    return ConsistencyVerdict(
        consistent=consistent,
        expected_digest=expected.digest,
        actual_digest=actual_digest,
        first_divergence=None if consistent else _first_divergence(expected.text, actual_text),
    )


def coverage(
    descriptor_path: str,
    frontend: str | None = None,
    annotations_path: str | None = None,
) -> CoverageLedger:
    """The mapped/unmapped/ignored partition for one descriptor."""
    result = load_descriptor(descriptor_path, frontend=frontend, annotations_path=annotations_path)
    result.ledger.check_partition(result.raw_paths)
    return result.ledger
