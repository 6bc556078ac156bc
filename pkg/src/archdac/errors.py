"""Exception types shared across the descriptor-to-diagram pipeline."""

from __future__ import annotations


class ArchdacError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.line = line

    def locate(self, path: str) -> str:
        """Render a file:line diagnostic prefix for CLI output."""
        if self.line is not None:
            return f"{path}:{self.line}: {self.message}"
        return f"{path}: {self.message}"


class ParseError(ArchdacError):
    """Input text is not well-formed (YAML/JSON syntax)."""


class SchemaError(ArchdacError):
    """Input parsed but does not have the required shape."""


class InvalidModel(ArchdacError):
    """Operation requires a meta-descriptor free of error findings."""


class UnknownDependency(ArchdacError):
    """A depends_on entry names a non-existent component."""


class DependencyCycle(ArchdacError):
    """The depends_on relation graph is cyclic."""


class AnnotationError(ArchdacError):
    """An architecture annotation matched the prefix but not the grammar."""


class UnknownTarget(ArchdacError):
    """An annotation names a target that does not exist."""


class FormatUnknown(ArchdacError):
    """A diagram file's format could not be determined."""
