"""Exception hierarchy shared by all lexrag modules.

Every domain failure raises a subclass of LexragError so the CLI can map
them uniformly to exit code 1 with a single "error:" line.
"""

from __future__ import annotations


class LexragError(Exception):
    """Base class for all domain errors."""


# --- statute parsing / corpus ---

class EmptyInputError(LexragError):
    """Raised for whitespace-only statute text."""


class DuplicateArticleError(LexragError):
    """Raised when the same article number opens twice in one document."""


class NonMonotonicNumberingError(LexragError):
    """Raised when chapter, article, or clause numbers do not increase."""


class EmptyArticleError(LexragError):
    """Raised when an article carries neither preamble text nor clauses."""


class NotFoundError(LexragError):
    """Raised when a reference does not resolve to a corpus segment."""


# --- chunking ---

class InvalidConfigError(LexragError):
    """Raised for chunk configs with size == 0 or overlap >= size."""


class EmptyTextError(LexragError):
    """Raised when asked to chunk empty text."""


# --- dataset generation ---

class InvalidFractionError(LexragError):
    """Raised when a split fraction falls outside (0, 1)."""


class ClientError(LexragError):
    """Raised by chat/embedding clients after their retries are exhausted."""


class TargetUnreachableError(LexragError):
    """Raised when generation cannot reach the per-task record targets.

    Carries the partial dataset and the per-task shortfall so callers can
    still persist what was produced.
    """

    def __init__(self, shortfall: dict, partial: list):
        self.shortfall = shortfall
        self.partial = partial
        detail = ", ".join(f"{task}={n}" for task, n in sorted(shortfall.items()))
        super().__init__(f"generation targets unreachable (shortfall: {detail})")


# --- vector knowledge base ---

class DimMismatchError(LexragError):
    """Raised when vector dimensions disagree."""


class ZeroVectorError(LexragError):
    """Raised when a zero-norm vector is used where a direction is required."""


class AllVectorsZeroError(LexragError):
    """Raised when every embedding in an index build has zero norm."""


class CorruptFileError(LexragError):
    """Raised for knowledge-base files with bad magic, checksum, or layout."""


class VersionMismatchError(LexragError):
    """Raised for knowledge-base files written by an unknown format version."""


# --- prompt assembly ---

class BudgetTooSmallError(LexragError):
    """Raised when system + user text alone exceed the token budget."""


# --- evaluation ---

class EmptyReferenceError(LexragError):
    """Raised when a metric is scored against an empty reference."""


class SchemaError(LexragError):
    """Raised for malformed JSONL input; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
