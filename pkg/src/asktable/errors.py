"""Exception types raised across the pipeline."""

from __future__ import annotations

from typing import Any


class AskTableError(Exception):
    """Base class for all engine errors."""


class DatasetError(AskTableError):
    """Problem loading or validating the tabular dataset."""


class MissingFileError(DatasetError):
    pass


class RaggedRowError(DatasetError):
    pass


class DuplicateColumnError(DatasetError):
    pass


class SchemaError(DatasetError):
    pass


class AnnotationError(AskTableError):
    """Request text could not be annotated (e.g. empty input)."""


class EmbeddingLoadError(AskTableError):
    """Malformed embedding file; carries the offending line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class BuilderError(AskTableError):
    """Graph construction failed outright (e.g. empty candidate list)."""


class UnintelligibleRequestError(BuilderError):
    """No anchors and no span matched any function above threshold.

    ``diagnostics`` carries the best partial scores for error reporting.
    """

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ExecutionError(AskTableError):
    """A node failed during execution; carries the failing node id."""

    def __init__(self, message: str, node_id: str | None = None):
        super().__init__(message)
        self.node_id = node_id


class EmptyAggregationError(ExecutionError):
    """mean/min/max requested over an empty series."""


class DegenerateFitError(ExecutionError):
    """Regression input has fewer than two distinct temporal labels."""


class StepRangeError(AskTableError):
    """step_back walked past the start of the primary input chain."""


class SessionError(AskTableError):
    """Unknown session or graph id."""


class CorpusError(AskTableError):
    """Malformed evaluation corpus; carries the offending line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
