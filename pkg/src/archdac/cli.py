"""Command-line driver.

Exit codes: 0 success, 1 inconsistency or error-severity lint findings,
2 parse errors, 3 validation/annotation errors. Artifacts go to stdout
unless ``-o`` is given; diagnostics always go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import backend, consistency, lint as lint_mod
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
from .meta_model import serialize_canonical
from .pipeline import FRONTENDS, load_descriptor

_PARSE_ERRORS = (ParseError, SchemaError, FormatUnknown)
_VALIDATION_ERRORS = (
    InvalidModel,
    AnnotationError,
    UnknownTarget,
    UnknownDependency,
    DependencyCycle,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="archdac",
        description="Convert DevOps descriptors into architecture diagrams as code.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help="descriptor file (Compose, Kubernetes, or .tf.json)")
        p.add_argument("--frontend", choices=FRONTENDS, help="override auto-detection")
        p.add_argument(
            "--annotations",
            metavar="PATH",
            help="annotation sidecar file (default: <input>.arch when present)",
        )

    meta_p = sub.add_parser("meta", help="write the canonical meta-descriptor")
    add_common(meta_p)
    meta_p.add_argument("-o", "--output", metavar="PATH")

    tr = sub.add_parser("transform", help="write diagram-as-code text")
    add_common(tr)
    tr.add_argument("--format", required=True, choices=backend.FORMATS)
    tr.add_argument(
        "--orientation", choices=backend.ORIENTATIONS, default="top-bottom"
    )
    tr.add_argument("--system-name", default="Software System")
    tr.add_argument(
        "--no-properties",
        action="store_true",
        help="omit component properties from node statements",
    )
    tr.add_argument("-o", "--output", metavar="PATH")

    ck = sub.add_parser("check", help="verify a stored diagram against its descriptor")
    add_common(ck)
    ck.add_argument("diagram", help="diagram-as-code file to verify")
    ck.add_argument(
        "--format",
        choices=backend.FORMATS,
        help="diagram format when the file carries no options header",
    )
    ck.add_argument(
        "--semantic",
        action="store_true",
        help="compare node/edge sets instead of bytes",
    )

    cov = sub.add_parser("coverage", help="write the mapped/unmapped/ignored ledger")
    add_common(cov)
    cov.add_argument("-o", "--output", metavar="PATH")

    li = sub.add_parser("lint", help="check the guideline rules")
    add_common(li)
    li.add_argument(
        "--format",
        choices=backend.FORMATS,
        help="also emit this format and lint the document (enables G2)",
    )
    li.add_argument("--tech-table", metavar="PATH", help="extra image->tag entries (YAML)")

    return parser


def _write(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except _VALIDATION_ERRORS as exc:
        print(f"archdac: {exc.locate(getattr(args, 'input', '<input>'))}", file=sys.stderr)
        return 3
    except _PARSE_ERRORS as exc:
        print(f"archdac: {exc.locate(getattr(args, 'input', '<input>'))}", file=sys.stderr)
        return 2
    except ArchdacError as exc:
        print(f"archdac: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"archdac: {exc}", file=sys.stderr)
        return 2


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "meta":
        result = load_descriptor(args.input, args.frontend, args.annotations)
        _write(serialize_canonical(result.meta), args.output)
        return 0

    if args.command == "transform":
        result = load_descriptor(args.input, args.frontend, args.annotations)
        opts = backend.EmitOptions(
            orientation=args.orientation,
            system_name=args.system_name,
            include_properties=not args.no_properties,
        )
        doc = backend.emit(result.meta, opts, args.format)
        _write(doc.text, args.output)
        return 0

    if args.command == "check":
        verdict = consistency.check(
            args.input,
            args.diagram,
            fmt=args.format,
            frontend=args.frontend,
            annotations_path=args.annotations,
            semantic=args.semantic,
        )
        if verdict.consistent:
            return 0
        where = (
            f" (first divergence at line {verdict.first_divergence})"
            if verdict.first_divergence is not None
            else ""
        )
        print(
            f"archdac: {args.diagram}:{verdict.first_divergence or 1}: "
            f"inconsistent with {args.input}{where}",
            file=sys.stderr,
        )
        return 1

    if args.command == "coverage":
        ledger = consistency.coverage(args.input, args.frontend, args.annotations)
        _write(ledger.to_report_yaml(), args.output)
        return 0

    if args.command == "lint":
        result = load_descriptor(args.input, args.frontend, args.annotations)
        dac = None
        if args.format:
            dac = backend.emit(result.meta, backend.EmitOptions(), args.format)
        table = lint_mod.load_tech_table(args.tech_table) if args.tech_table else None
        findings = lint_mod.lint(result.meta, dac, table)
        sys.stdout.write(lint_mod.findings_report(findings))
        for finding in findings:
            print(f"archdac: {args.input}: {finding.render()}", file=sys.stderr)
        return 1 if any(f.severity == "error" for f in findings) else 0

    raise AssertionError(f"unhandled command {args.command!r}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
