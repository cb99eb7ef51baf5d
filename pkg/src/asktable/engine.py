"""Pipeline facade: one object wiring annotation, compilation, execution,
and recommendation over shared immutable resources."""

from __future__ import annotations

import json
import os
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import (
    AnnotatorConfig,
    annotate,
    extract_modality,
    load_stopwords,
    load_triggers,
)
from .dataset import (
    Dataset,
    bundled_dataset_path,
    bundled_schema_path,
    load_dataset,
    load_gazetteer,
)
from .embeddings import EmbeddingStore, bundled_embeddings_path, load_embeddings
from .executor import ExecutionTrace, execute
from .explore import HistoryEntry, Session, SessionStore
from .graph import BuilderConfig, GraphBuilder, OperationGraph, select, to_wire
from .registry import Registry, load_registry
from .values import Value
from .viz import VizModel, VizSpec, bundled_model_path, load_compat_matrix, recommend

_ENV_PREFIX = "ASKTABLE_"


@dataclass
class EngineConfig:
    dataset_path: str | None = None
    schema_path: str | None = None
    gazetteer_path: str | None = None
    registry_manifest: str | None = None
    embeddings_path: str | None = None
    viz_model_path: str | None = None
    compat_path: str | None = None
    stopwords_path: str | None = None
    triggers_path: str | None = None
    reference_year: int = 0  # 0 -> current system year
    tau_fn: float = 0.55
    tau_data: float = 0.60
    beam_width: int = 8
    max_depth: int = 6
    anomaly_threshold: float = 2.5
    top_n: int = 3
    session_ttl: float = 3600.0
    port: int = 8756

    @classmethod
    def from_sources(cls, config_path: str | Path | None = None) -> "EngineConfig":
        """Config file (JSON) merged with ASKTABLE_* environment overrides."""
        data: dict = {}
        path = config_path or os.environ.get(_ENV_PREFIX + "CONFIG")
        if path:
            data.update(json.loads(Path(path).read_text()))
        cfg = cls(**data)
        for f in (
            "dataset_path", "schema_path", "gazetteer_path", "registry_manifest",
            "embeddings_path", "viz_model_path", "compat_path",
            "stopwords_path", "triggers_path",
        ):
            env = os.environ.get(_ENV_PREFIX + f.upper())
            if env:
                setattr(cfg, f, env)
        for f, cast in (
            ("reference_year", int), ("tau_fn", float), ("tau_data", float),
            ("beam_width", int), ("max_depth", int), ("anomaly_threshold", float),
            ("top_n", int), ("session_ttl", float), ("port", int),
        ):
            env = os.environ.get(_ENV_PREFIX + f.upper())
            if env:
                setattr(cfg, f, cast(env))
        return cfg


@dataclass
class QueryResult:
    text: str
    answer: Value
    viz: VizSpec
    graph: OperationGraph
    graph_id: str
    session_id: str | None
    trace: ExecutionTrace
    diagnostics: list[str] = field(default_factory=list)
    candidates: int = 0

    def to_response(self) -> dict:
        return {
            "answer": self.answer.to_dict(),
            "viz_spec": self.viz.to_dict(),
            "graph": to_wire(self.graph),
            "graph_id": self.graph_id,
            "session_id": self.session_id,
            "diagnostics": list(self.diagnostics),
        }


class Engine:
    """Shared immutable pipeline state; query() is safe to call concurrently."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        cfg = self.config
        gazetteer = load_gazetteer(cfg.gazetteer_path) if cfg.gazetteer_path else load_gazetteer()
        dataset_path = cfg.dataset_path or bundled_dataset_path()
        schema_path = cfg.schema_path
        if schema_path is None and str(dataset_path) == str(bundled_dataset_path()):
            schema_path = bundled_schema_path()
        self.dataset: Dataset = load_dataset(dataset_path, schema_path, gazetteer)
        self.embeddings: EmbeddingStore = load_embeddings(
            cfg.embeddings_path or bundled_embeddings_path()
        )
        self.registry: Registry = load_registry(cfg.registry_manifest)
        self.viz_model: VizModel = VizModel.from_file(
            cfg.viz_model_path or bundled_model_path()
        )
        self.compat = load_compat_matrix(cfg.compat_path)
        self.annotator_config = AnnotatorConfig(
            reference_year=cfg.reference_year,
            tau_data=cfg.tau_data,
            embeddings=self.embeddings,
            stopwords=load_stopwords(cfg.stopwords_path) if cfg.stopwords_path else frozenset(),
            triggers=load_triggers(cfg.triggers_path) if cfg.triggers_path else {},
        )
        self.builder = GraphBuilder(
            self.registry,
            self.dataset,
            self.embeddings,
            BuilderConfig(
                beam_width=cfg.beam_width,
                max_depth=cfg.max_depth,
                tau_fn=cfg.tau_fn,
                anomaly_threshold=cfg.anomaly_threshold,
            ),
        )

    def compile(self, text: str) -> list[OperationGraph]:
        phrase = annotate(text, self.dataset, self.annotator_config)
        return self.builder.build(phrase)

    def query(
        self,
        text: str,
        session: Session | None = None,
        store: SessionStore | None = None,
    ) -> QueryResult:
        phrase = annotate(text, self.dataset, self.annotator_config)
        candidates = self.builder.build(phrase)
        graph = select(candidates)
        answer, trace = execute(graph, self.dataset, self.registry)
        modality = extract_modality(phrase)
        viz = recommend(answer, modality, self.viz_model, self.compat)

        diagnostics = list(viz.diagnostics)
        if not graph.complete:
            diagnostics.append(
                "no complete operation graph; executed the deepest partial graph"
            )

        graph_id = uuid.uuid4().hex[:12]
        result = QueryResult(
            text=text,
            answer=answer,
            viz=viz,
            graph=graph,
            graph_id=graph_id,
            session_id=session.session_id if session else None,
            trace=trace,
            diagnostics=diagnostics,
            candidates=len(candidates),
        )
        if session is not None and store is not None:
            store.record(
                session,
                HistoryEntry(
                    request=text,
                    graph_id=graph_id,
                    graph=graph,
                    trace=trace,
                    answer=answer,
                    viz=viz,
                ),
            )
        return result
