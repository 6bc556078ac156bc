"""Strict YAML loading and a deterministic block-style writer.

Loading rejects duplicate mapping keys and keeps date-like strings as
strings so that values survive a parse/serialize round trip unchanged.
The writer produces the exact text layout the canonical formats require:
2-space indent, sequence dashes at the parent key's column, LF endings,
scalars quoted only when a YAML parser would otherwise reinterpret them.
"""

from __future__ import annotations

import json
import re
from typing import Any

import yaml

from .errors import ParseError, SchemaError


class _StrictLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader: _StrictLoader, node: yaml.MappingNode) -> dict:
    loader.flatten_mapping(node)
    mapping: dict = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        if isinstance(key, list):
            raise ParseError("unhashable mapping key", line=key_node.start_mark.line + 1)
        if key in mapping:
            raise SchemaError(
                f"duplicate mapping key {key!r}", line=key_node.start_mark.line + 1
            )
        mapping[key] = loader.construct_object(value_node, deep=True)
    return mapping


_StrictLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping
)
# Timestamps stay strings: descriptor values are configuration text, not dates.
_StrictLoader.add_constructor(
    "tag:yaml.org,2002:timestamp", _StrictLoader.construct_yaml_str
)


def load_all(text: str) -> list[Any]:
    """Parse a (possibly multi-document) YAML stream, dropping empty documents."""
    try:
        docs = list(yaml.load_all(text, Loader=_StrictLoader))
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ParseError(f"invalid YAML: {exc}", line=line) from exc
    return [doc for doc in docs if doc is not None]


def load_one(text: str) -> Any:
    """Parse a single-document YAML text; empty input yields None."""
    docs = load_all(text)
    if not docs:
        return None
    if len(docs) > 1:
        raise SchemaError("expected a single YAML document, found a stream")
    return docs[0]


_PLAIN_RE = re.compile(r"^(?:[A-Za-z0-9._/]|-(?!\s))[A-Za-z0-9 ._/:@%+()-]*$")
_AMBIGUOUS = frozenset(
    {"", "~", "null", "true", "false", "yes", "no", "on", "off", ".inf", "-.inf", "+.inf", ".nan"}
)
# Digit/punctuation-only strings risk reinterpretation as ints, floats, or
# sexagesimals ("3000:3000"); quote anything in that shape.
_NUMERIC_SHAPE_RE = re.compile(r"^[0-9+\-._:,eE]+$")


def _needs_quote(text: str) -> bool:
    if text.lower() in _AMBIGUOUS:
        return True
    if not _PLAIN_RE.match(text):
        return True
    if text != text.strip():
        return True
    if ": " in text or " #" in text or text.endswith(":"):
        return True
    if _NUMERIC_SHAPE_RE.match(text) and any(ch.isdigit() for ch in text):
        return True
    return False


def format_scalar(value: Any) -> str:
    """Render one scalar exactly as the canonical writer emits it."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False) if _needs_quote(value) else value
    raise TypeError(f"unsupported scalar type: {type(value).__name__}")


def _emit(value: Any, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            label = format_scalar(str(key))
            if isinstance(item, dict):
                if item:
                    lines.append(f"{pad}{label}:")
                    _emit(item, indent + 1, lines)
                else:
                    lines.append(f"{pad}{label}: {{}}")
            elif isinstance(item, (list, tuple)):
                if item:
                    lines.append(f"{pad}{label}:")
                    _emit(list(item), indent, lines)
                else:
                    lines.append(f"{pad}{label}: []")
            else:
                lines.append(f"{pad}{label}: {format_scalar(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, dict):
                first = True
                for key, sub in item.items():
                    label = format_scalar(str(key))
                    if not isinstance(sub, (dict, list, tuple)):
                        rendered = f"{label}: {format_scalar(sub)}"
                    elif not sub:
                        rendered = f"{label}: {'{}' if isinstance(sub, dict) else '[]'}"
                    else:
                        raise TypeError("nested collections inside list items are not supported")
                    lines.append(f"{pad}- {rendered}" if first else f"{pad}  {rendered}")
                    first = False
            elif isinstance(item, (list, tuple)):
                raise TypeError("nested sequences are not supported")
            else:
                lines.append(f"{pad}- {format_scalar(item)}")
    else:
        lines.append(f"{pad}{format_scalar(value)}")


def dump_canonical(doc: dict) -> str:
    """Serialize a document dict with deterministic, minimal-quoting layout.

    Key order is the dict's insertion order; callers pre-sort where the
    format demands sorted output.
    """
    lines: list[str] = []
    _emit(doc, 0, lines)
    return "\n".join(lines) + "\n"
