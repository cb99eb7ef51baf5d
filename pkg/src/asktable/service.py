"""HTTP facade: query, graph inspection, exploration, and schema endpoints."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import Engine, EngineConfig
from .errors import (
    AskTableError,
    ExecutionError,
    SessionError,
    StepRangeError,
    UnintelligibleRequestError,
)
from .explore import SessionStore, jump_to_node, step_back
from .graph import to_wire


class QueryBody(BaseModel):
    text: str
    session_id: str | None = None


class ExploreBody(BaseModel):
    graph_id: str
    steps: int | None = None
    node_id: str | None = None


def create_app(
    engine: Engine | None = None,
    config: EngineConfig | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    engine = engine or Engine(config or EngineConfig.from_sources())
    store = SessionStore(ttl_seconds=engine.config.session_ttl)
    app = FastAPI(title="asktable", version="0.1.0")
    app.state.engine = engine
    app.state.sessions = store

    @app.post("/api/query")
    def query(body: QueryBody):
        text = body.text.strip() if body.text else ""
        if not text:
            raise HTTPException(status_code=422, detail="text must be non-empty")
        session = store.get_or_create(body.session_id)
        try:
            result = engine.query(text, session=session, store=store)
        except UnintelligibleRequestError as e:
            return JSONResponse(
                status_code=422,
                content={"error": str(e), "diagnostics": e.diagnostics},
            )
        except ExecutionError as e:
            return JSONResponse(
                status_code=500,
                content={"error": str(e), "node_id": e.node_id},
            )
        return result.to_response()

    @app.get("/api/graph/{graph_id}")
    def graph(graph_id: str):
        try:
            _, entry = store.find_graph(graph_id)
        except SessionError:
            raise HTTPException(status_code=404, detail=f"unknown graph {graph_id!r}")
        return {
            "graph": to_wire(entry.graph),
            "trace": entry.trace.to_dict(),
            "request": entry.request,
        }

    @app.post("/api/explore")
    def explore(body: ExploreBody):
        try:
            session, entry = store.find_graph(body.graph_id)
        except SessionError:
            raise HTTPException(status_code=404, detail=f"unknown graph {body.graph_id!r}")
        try:
            if body.node_id is not None:
                node_id, value, spec = jump_to_node(
                    session, body.graph_id, body.node_id, engine.viz_model
                )
            else:
                steps = body.steps if body.steps is not None else 1
                # absolute addressing from the sink over HTTP; the library
                # walk is cursor-relative
                node_id, value, spec = step_back(
                    session, body.graph_id, steps, engine.viz_model, from_sink=True
                )
        except StepRangeError as e:
            raise HTTPException(status_code=416, detail=str(e))
        except SessionError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return {
            "node_id": node_id,
            "value": value.to_dict(),
            "viz_spec": spec.to_dict(),
        }

    @app.get("/api/schema")
    def schema():
        ds = engine.dataset
        return {
            "name": ds.name,
            "row_count": len(ds.rows),
            "columns": [
                {
                    "name": c.name,
                    "semantic_type": c.semantic_type,
                    "unit": c.unit,
                    "aliases": list(c.aliases),
                }
                for c in ds.columns
            ],
            "table_aliases": list(ds.table_aliases),
        }

    @app.exception_handler(AskTableError)
    def on_engine_error(request, exc):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    static = Path(static_dir) if static_dir else Path(__file__).parent.parent.parent / "frontend" / "dist"
    if static.is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")
    return app


def serve(config: EngineConfig | None = None, port: int | None = None) -> None:
    import uvicorn

    config = config or EngineConfig.from_sources()
    app = create_app(config=config)
    uvicorn.run(app, host="0.0.0.0", port=port or config.port)
