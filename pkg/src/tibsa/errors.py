"""Exception hierarchy shared across the engine.

Every error raised on a bad input derives from EngineError so the CLI can
map it to exit code 1, keeping exit code 2 for genuine I/O failures.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all validation and domain errors."""


class ParseError(EngineError):
    """A document could not be parsed; names the offending line or field."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        detail = message
        if line is not None:
            detail = f"{detail} (line {line})"
        if field is not None:
            detail = f"{detail} (field {field})"
        super().__init__(detail)
        self.line = line
        self.field = field


class ConflictError(EngineError):
    """Two records claim the same identity with differing content."""


class UnknownIdError(EngineError):
    """An identifier does not resolve against the available records."""


class InputValidationError(EngineError):
    """Semantic validation failed; carries one finding per problem."""

    def __init__(self, findings: list[str]):
        super().__init__("; ".join(findings))
        self.findings = list(findings)


class CycleError(EngineError):
    """Hierarchical edges form a cycle."""


class StatusError(EngineError):
    """An operation was attempted out of lifecycle order."""


class VersionError(EngineError):
    """A document declares an unsupported schema version."""


class IntegrityError(EngineError):
    """Stored content does not match its recorded checksum."""


class MatrixConfigError(EngineError):
    """A score-matrix configuration violates the ordering rules."""
