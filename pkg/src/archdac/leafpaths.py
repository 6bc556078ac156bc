"""Leaf-path enumeration over descriptor documents.

A leaf is a scalar position (including null); empty containers contribute
nothing. Paths join mapping keys with ``.`` and append ``[i]`` for sequence
indices. Multi-document YAML streams prefix each document's paths with
``doc[i].`` unless the stream holds exactly one document.
"""

from __future__ import annotations

import json
from typing import Any

from . import yamlio
from .errors import ParseError


def iter_leaf_paths(data: Any, prefix: str = "") -> list[str]:
    """All leaf paths under ``data``, in document order."""
    paths: list[str] = []
    stack: list[tuple[str, Any]] = [(prefix, data)]
    while stack:
        path, value = stack.pop()
        if isinstance(value, dict):
            children = [
                (f"{path}.{key}" if path else str(key), item)
                for key, item in value.items()
            ]
            stack.extend(reversed(children))
        elif isinstance(value, (list, tuple)):
            children = [(f"{path}[{i}]", item) for i, item in enumerate(value)]
            stack.extend(reversed(children))
        else:
            paths.append(path)
    return paths


def yaml_stream_paths(text: str) -> list[str]:
    """Leaf paths for a YAML stream, applying the ``doc[i].`` prefix rule."""
    docs = yamlio.load_all(text)
    if len(docs) == 1:
        return iter_leaf_paths(docs[0])
    paths: list[str] = []
    for i, doc in enumerate(docs):
        paths.extend(
            f"doc[{i}].{p}" if p else f"doc[{i}]" for p in iter_leaf_paths(doc)
        )
    return paths


def json_paths(text: str) -> list[str]:
    """Leaf paths for a JSON document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return iter_leaf_paths(data)
