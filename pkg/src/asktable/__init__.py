"""Natural-language analytics over a single CSV table.

Requests compile into typed operation graphs (scan, filter, project,
aggregate, group, rank, compare, forecast, anomaly detection), execute
locally, and return a machine-readable answer plus a top-3 visualization
recommendation from a kNN model over historical examples.
"""

from .annotate import AnnotatorConfig, PhraseStructure, annotate, extract_modality
from .dataset import ColumnSchema, Dataset, load_dataset, load_gazetteer
from .embeddings import EmbeddingStore, load_embeddings
from .engine import Engine, EngineConfig, QueryResult
from .errors import AskTableError
from .executor import ExecutionTrace, execute
from .explore import Session, SessionStore, overlay, step_back
from .graph import (
    BuilderConfig,
    OperationGraph,
    OperationNode,
    build,
    from_wire,
    select,
    to_wire,
)
from .registry import FunctionSpec, Registry, builtin_registry, load_registry, match_function
from .values import Value, ValueKind
from .viz import VizModel, VizSpec, featurize, predict_topk, recommend

__version__ = "0.1.0"

__all__ = [
    "AnnotatorConfig",
    "AskTableError",
    "BuilderConfig",
    "ColumnSchema",
    "Dataset",
    "EmbeddingStore",
    "Engine",
    "EngineConfig",
    "ExecutionTrace",
    "FunctionSpec",
    "OperationGraph",
    "OperationNode",
    "PhraseStructure",
    "QueryResult",
    "Registry",
    "Session",
    "SessionStore",
    "Value",
    "ValueKind",
    "VizModel",
    "VizSpec",
    "annotate",
    "build",
    "builtin_registry",
    "execute",
    "extract_modality",
    "featurize",
    "from_wire",
    "load_dataset",
    "load_embeddings",
    "load_gazetteer",
    "load_registry",
    "match_function",
    "overlay",
    "predict_topk",
    "recommend",
    "select",
    "step_back",
    "to_wire",
]
