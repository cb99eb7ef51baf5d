"""Generate golden wire-format fixtures for the browser client tests.

Everything below flows through the primary component's public wire
formats (Value / VizSpec / graph documents / QueryResponse), so the
frontend tests exercise exactly what the HTTP API produces.
"""

from __future__ import annotations

import json
from pathlib import Path

from asktable.engine import Engine, EngineConfig
from asktable.explore import SessionStore, overlay, step_back
from asktable.values import Value, TableColumn, scalar, series, text
from asktable.viz import recommend

OUT = Path(__file__).resolve().parents[1] / "frontend" / "test" / "fixtures"

engine = Engine(EngineConfig(reference_year=2020))
model = engine.viz_model


def spec_for(value: Value, modality=None) -> dict:
    return recommend(value, modality, model, engine.compat).to_dict()


def query_response(question: str) -> dict:
    store = SessionStore()
    session = store.create()
    result = engine.query(question, session=session, store=store)
    return result.to_response()


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    fixtures: dict[str, dict] = {}

    # one fixture per visualization form, each with a compatible value
    text_value = text("Alabama")
    fixtures["text_answer"] = {
        "value": text_value.to_dict(),
        "viz_spec": spec_for(text_value, "text_answer"),
    }

    kpi = scalar(2.4, "USD/lb")
    fixtures["kpi_card"] = {"value": kpi.to_dict(), "viz_spec": spec_for(kpi)}

    table_q = engine.query("Show me all data for Alabama in 2010 as a table")
    fixtures["table_view"] = {
        "value": table_q.answer.to_dict(),
        "viz_spec": table_q.viz.to_dict(),
    }

    top5 = engine.query("Top 5 states by honey production in 2011")
    fixtures["bar_chart"] = {
        "value": top5.answer.to_dict(),
        "viz_spec": spec_for(top5.answer, "bar_chart"),
    }

    line_q = engine.query("California honey prices by year")
    fixtures["line_chart"] = {"value": line_q.answer.to_dict(), "viz_spec": line_q.viz.to_dict()}

    anomaly_q = engine.query("Are there anomalies in the Illinois honey prices?")
    anomaly_spec = recommend(anomaly_q.answer, None, model, engine.compat)
    anomaly_spec.viz_type = "scatter_plot"
    fixtures["scatter_plot"] = {
        "value": anomaly_q.answer.to_dict(),
        "viz_spec": anomaly_spec.to_dict(),
    }

    shares = series(
        [("Montana", 25.0), ("Texas", 35.0), ("Iowa", 15.0), ("Oregon", 25.0)],
        "categorical",
        unit="%",
        name="production share",
    )
    fixtures["pie_chart"] = {"value": shares.to_dict(), "viz_spec": spec_for(shares, "pie_chart")}

    geo_q = engine.query("Honey production per state in 2010 on a map")
    fixtures["geo_heatmap"] = {"value": geo_q.answer.to_dict(), "viz_spec": geo_q.viz.to_dict()}

    matrix_table = Value(
        kind="table",
        schema=[
            TableColumn("state", "location"),
            TableColumn("priceperlb", "numerical", "USD/lb"),
            TableColumn("totalprod", "numerical", "lb"),
        ],
        rows=[["Alabama", 2.4, 1202800.0], ["Georgia", 1.85, 13689600.0], ["Texas", 1.29, 5364800.0]],
    )
    fixtures["matrix_heatmap"] = {
        "value": matrix_table.to_dict(),
        "viz_spec": spec_for(matrix_table, "matrix_heatmap"),
    }

    forecast_q = engine.query("How will the average honey price develop in Florida next year?")
    fixtures["forecast_line"] = {
        "value": forecast_q.answer.to_dict(),
        "viz_spec": forecast_q.viz.to_dict(),
    }

    # the mean-overlay exploration fixture: one step back from an average
    store = SessionStore()
    session = store.create()
    mean_q = engine.query(
        "What was the average price of honey in Alabama?", session=session, store=store
    )
    node_id, value, spec = step_back(session, mean_q.graph_id, 1, model)
    fixtures["mean_overlay_explore"] = {
        "node_id": node_id,
        "value": value.to_dict(),
        "viz_spec": spec.to_dict(),
    }

    # a stacked overlay (table intermediate + scalar answer)
    stacked = overlay(mean_q.answer, table_q.answer, model)
    fixtures["stacked_overlay"] = {
        "node_id": "n1_filter",
        "value": table_q.answer.to_dict(),
        "viz_spec": stacked.to_dict(),
    }

    fixtures["query_response"] = query_response(
        "What was the price of honey in Alabama in 2010?"
    )
    fixtures["query_response_geo"] = query_response(
        "Honey production per state in 2010 on a map"
    )

    path = OUT / "fixtures.json"
    path.write_text(json.dumps(fixtures, indent=1, sort_keys=True))
    print(f"wrote {len(fixtures)} fixtures to {path}")


if __name__ == "__main__":
    main()
