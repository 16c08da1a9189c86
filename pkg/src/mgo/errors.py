"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`MgoError` so the CLI can
catch one type and exit with a clean message.
"""

from __future__ import annotations

__all__ = [
    "MgoError",
    "ParseError",
    "VocabularyError",
    "IntegrityError",
    "ConfigError",
    "ModelError",
    "PreconditionError",
    "BuildError",
    "InterpretationError",
    "NotFoundError",
    "StateError",
]


class MgoError(Exception):
    """Base class for every error this package raises deliberately."""


class ParseError(MgoError):
    """Malformed input file. Carries file path and line number when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        self.bare_message = message
        prefix = ""
        if path is not None:
            prefix = f"{path}:" if line is None else f"{path}:{line}:"
        elif line is not None:
            prefix = f"line {line}:"
        super().__init__(f"{prefix} {message}".strip())


class VocabularyError(ParseError):
    """A serialized graph uses a relation outside the fixed vocabulary."""


class IntegrityError(MgoError):
    """Referential problem in a terminology snapshot (dangling ids, cycles, roots)."""


class ConfigError(MgoError):
    """Bad configuration input, e.g. an unusable heading map."""


class ModelError(MgoError):
    """Graph typing violation: kind clash, partition mismatch, bad merge."""


class PreconditionError(MgoError):
    """An operation was called with arguments outside its contract."""


class BuildError(MgoError):
    """Ontology construction cannot proceed (unresolvable condition, stale decisions)."""


class InterpretationError(MgoError):
    """Consultation graph cannot be interpreted against the ontology."""


class NotFoundError(MgoError):
    """Lookup by identifier failed."""


class StateError(MgoError):
    """Persisted service state is unreadable; includes a recovery hint."""
