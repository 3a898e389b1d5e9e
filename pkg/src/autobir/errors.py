"""Error taxonomy shared across the package.

Every public error carries a stable ``code`` so the HTTP service and the
CLI can map failures without string matching on messages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class AutobirError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details


# --- physical model ---------------------------------------------------------


class DdlSyntaxError(AutobirError):
    """Raised when DDL text falls outside the supported grammar."""

    code = "ddl_syntax"

    def __init__(self, message: str, line: int, column: int = 0) -> None:
        super().__init__(
            f"{message} at line {line}, column {column}", line=line, column=column
        )
        self.message = message
        self.line = line
        self.column = column


class SchemaReferenceError(AutobirError):
    """A foreign key references an unknown table or column."""

    code = "schema_reference"


class EngineConnectionError(AutobirError):
    """The embedded engine could not be reached or opened."""

    code = "engine_connection"


class UnsupportedTypeWarning(UserWarning):
    """Emitted when an engine column type falls outside the closed type set.

    The column is mapped to VARCHAR rather than dropped; the warning keeps
    the mapping visible.
    """


# --- ontology / policies ----------------------------------------------------


class DerivationError(AutobirError):
    code = "derivation"


class PolicyConflictError(AutobirError):
    """A refinement action would create a duplicate identifier."""

    code = "policy_conflict"


class UnboundEntityError(AutobirError):
    """Grounding was asked for an entity the binding set does not cover."""

    code = "unbound_entity"


class UnknownEntityError(AutobirError):
    code = "unknown_entity"


# --- semantic index ---------------------------------------------------------


class EmbedderError(AutobirError):
    code = "embedder"


class EmptyIndexError(AutobirError):
    code = "empty_index"


class NoSeedError(AutobirError):
    """No question term cleared the seed similarity threshold."""

    code = "no_seed"


# --- pipeline / execution ---------------------------------------------------


class ProviderError(AutobirError):
    """The language-model provider failed or returned garbage."""

    code = "provider"


class ScriptExhaustedError(ProviderError):
    """A scripted provider ran out of prepared responses."""

    code = "script_exhausted"


class GuardError(AutobirError):
    """A statement other than a single SELECT reached the execution layer."""

    code = "guard"


class EngineError(AutobirError):
    """The engine rejected a query at execution time."""

    code = "engine"


class ChartGenerationExhausted(AutobirError):
    """No valid chart specification within the repair budget."""

    code = "chart_exhausted"


# --- catalog ----------------------------------------------------------------


class DuplicateNameError(AutobirError):
    code = "duplicate_name"


class NotFoundError(AutobirError):
    code = "not_found"


class StorageError(AutobirError):
    code = "storage"


class CorruptArtifactError(AutobirError):
    """A persisted artifact failed to load; names the offending path."""

    code = "corrupt_artifact"

    def __init__(self, message: str, path: str = "", **details: Any) -> None:
        super().__init__(message, path=path, **details)
        self.path = path


# --- configuration ----------------------------------------------------------


class ConfigError(AutobirError):
    code = "config"


class BindError(AutobirError):
    """The service listen address is occupied or unusable."""

    code = "bind"


# --- shared diagnostics -----------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; ``subject`` names the offending element."""

    code: str
    message: str
    subject: str = ""
    details: dict = field(default_factory=dict)
