"""Step-back exploration over executed graphs and overlay visualization.

A session remembers every answered request (graph, trace, answer). The
cursor walks backward from the sink along primary (slot-0) inputs, and
intermediate results can be visualized together with the final answer:
a series with a reference line at its aggregate, a multi-series chart,
or stacked specs as the universal fallback.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SessionError, StepRangeError
from .executor import ExecutionTrace
from .graph import OperationGraph, to_wire
from .values import Value
from .viz import VizModel, VizSpec, binding_for


@dataclass
class HistoryEntry:
    request: str
    graph_id: str
    graph: OperationGraph
    trace: ExecutionTrace
    answer: Value
    viz: VizSpec


@dataclass
class Session:
    session_id: str
    history: list[HistoryEntry] = field(default_factory=list)
    cursor: tuple[str, str] | None = None  # (graph_id, node_id)
    last_used: float = field(default_factory=time.monotonic)

    def entry_for(self, graph_id: str) -> HistoryEntry:
        for e in self.history:
            if e.graph_id == graph_id:
                return e
        raise SessionError(f"unknown graph id {graph_id!r}")


class SessionStore:
    """In-memory sessions with idle TTL; snapshot/restore for restarts."""

    def __init__(self, ttl_seconds: float = 3600.0):
        self.ttl = ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._graph_index: dict[str, str] = {}  # graph_id -> session_id
        self._lock = threading.Lock()

    def _purge(self) -> None:
        now = time.monotonic()
        dead = [sid for sid, s in self._sessions.items() if now - s.last_used > self.ttl]
        for sid in dead:
            for e in self._sessions[sid].history:
                self._graph_index.pop(e.graph_id, None)
            del self._sessions[sid]

    def create(self) -> Session:
        with self._lock:
            self._purge()
            session = Session(uuid.uuid4().hex[:12])
            self._sessions[session.session_id] = session
            return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionError(f"unknown session {session_id!r}")
            session.last_used = time.monotonic()
            return session

    def get_or_create(self, session_id: str | None) -> Session:
        if session_id is None:
            return self.create()
        try:
            return self.get(session_id)
        except SessionError:
            return self.create()

    def record(self, session: Session, entry: HistoryEntry) -> None:
        with self._lock:
            session.history.append(entry)
            session.cursor = (entry.graph_id, entry.graph.sink)
            session.last_used = time.monotonic()
            self._graph_index[entry.graph_id] = session.session_id

    def find_graph(self, graph_id: str) -> tuple[Session, HistoryEntry]:
        with self._lock:
            self._purge()
            sid = self._graph_index.get(graph_id)
            if sid is None or sid not in self._sessions:
                raise SessionError(f"unknown graph id {graph_id!r}")
            session = self._sessions[sid]
            session.last_used = time.monotonic()
            return session, session.entry_for(graph_id)

    def snapshot(self, path: str | Path) -> None:
        with self._lock:
            doc = {
                sid: {
                    "history": [
                        {
                            "request": e.request,
                            "graph_id": e.graph_id,
                            "graph": to_wire(e.graph),
                            "trace": e.trace.to_dict(),
                            "answer": e.answer.to_dict(),
                            "viz": e.viz.to_dict(),
                        }
                        for e in s.history
                    ],
                    "cursor": list(s.cursor) if s.cursor else None,
                }
                for sid, s in self._sessions.items()
            }
        Path(path).write_text(json.dumps(doc, sort_keys=True))


def _primary_chain(graph: OperationGraph) -> list[str]:
    """Node ids from the sink backward along slot-0 inputs."""
    chain = [graph.sink]
    current = graph.node(graph.sink)
    while current.input_edges:
        nxt = current.input_edges[0]
        chain.append(nxt)
        current = graph.node(nxt)
    return chain


def step_back(
    session: Session,
    graph_id: str,
    steps: int,
    model: VizModel,
    from_sink: bool = False,
) -> tuple[str, Value, VizSpec]:
    """Walk backward along the primary input chain and visualize that node.

    Consecutive calls continue from the cursor (so back(1) twice equals
    back(2)); pass from_sink=True for absolute addressing from the sink.
    """
    entry = session.entry_for(graph_id)
    chain = _primary_chain(entry.graph)
    if from_sink or session.cursor is None or session.cursor[0] != graph_id:
        position = 0
    else:
        position = chain.index(session.cursor[1])
    target = position + steps
    if steps < 0 or target >= len(chain):
        raise StepRangeError(
            f"cannot step {steps} back from position {position}; "
            f"chain has {len(chain) - 1} steps"
        )
    node_id = chain[target]
    value = entry.trace.results[node_id]
    spec = overlay(entry.answer, value, model) if target > 0 else entry.viz
    session.cursor = (graph_id, node_id)
    return node_id, value, spec


def jump_to_node(
    session: Session, graph_id: str, node_id: str, model: VizModel
) -> tuple[str, Value, VizSpec]:
    """Explicit node addressing for branches off the primary chain."""
    entry = session.entry_for(graph_id)
    if node_id not in entry.trace.results:
        raise SessionError(f"graph {graph_id!r} has no node {node_id!r}")
    value = entry.trace.results[node_id]
    spec = overlay(entry.answer, value, model) if node_id != entry.graph.sink else entry.viz
    session.cursor = (graph_id, node_id)
    return node_id, value, spec


def _default_viz(value: Value) -> str:
    if value.kind == "scalar" or value.kind == "boolean":
        return "kpi_card"
    if value.kind == "text":
        return "text_answer"
    if value.kind == "table":
        return "table_view"
    if value.kind == "geo_series":
        return "geo_heatmap"
    if value.kind == "forecast":
        return "line_chart"
    if value.kind == "anomaly_report":
        return "line_chart"
    if value.kind == "series" and value.label_kind == "temporal":
        return "line_chart"
    return "bar_chart"


def _series_binding(value: Value) -> dict:
    binding = {
        "x": "region" if value.kind == "geo_series" else (value.label_kind or "label"),
        "y": value.name or "value",
    }
    if value.unit:
        binding["unit"] = value.unit
    return binding


def overlay(final: Value, intermediate: Value, model: VizModel) -> VizSpec:
    """Visualize an intermediate result together with the final answer."""
    series_kinds = ("series", "geo_series")

    if intermediate.kind in series_kinds and final.kind == "scalar":
        binding = _series_binding(intermediate)
        binding["reference_line"] = final.value
        if final.unit:
            binding["reference_unit"] = final.unit
        return VizSpec(
            viz_type=_default_viz(intermediate),
            binding=binding,
            title=f"{intermediate.name or 'values'} with answer line",
            ranking=[(_default_viz(intermediate), 0)],
        )

    if (
        intermediate.kind in series_kinds
        and final.kind in series_kinds
        and intermediate.kind == final.kind
        and (intermediate.kind == "geo_series" or intermediate.label_kind == final.label_kind)
    ):
        binding = _series_binding(intermediate)
        binding["overlay_series"] = {
            "name": final.name or "answer",
            "points": [list(p) for p in final.points],
        }
        return VizSpec(
            viz_type=_default_viz(intermediate),
            binding=binding,
            title=f"{intermediate.name or 'values'} vs {final.name or 'answer'}",
            ranking=[(_default_viz(intermediate), 0)],
        )

    if final.kind == "forecast" and intermediate.kind == "series":
        binding = _series_binding(intermediate)
        binding["predicted_from"] = final.predicted[0][0] if final.predicted else None
        binding["predicted"] = [list(p) for p in final.predicted]
        return VizSpec(
            viz_type="line_chart",
            binding=binding,
            title=f"{intermediate.name or 'history'} with forecast",
            ranking=[("line_chart", 0)],
        )

    inter_type = _default_viz(intermediate)
    inter_spec = VizSpec(
        viz_type=inter_type,
        binding=binding_for(inter_type, intermediate),
        title=intermediate.name or "intermediate result",
        ranking=[(inter_type, 0)],
    )
    final_type = _default_viz(final)
    final_spec = VizSpec(
        viz_type=final_type,
        binding=binding_for(final_type, final),
        title="final answer",
        ranking=[(final_type, 0)],
    )
    inter_spec.stacked = [final_spec]
    return inter_spec
