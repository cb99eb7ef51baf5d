import pytest

from asktable.errors import StepRangeError
from asktable.explore import SessionStore, jump_to_node, overlay, step_back
from asktable.values import scalar, series


@pytest.fixture
def session_with_query(engine):
    store = SessionStore()
    session = store.create()
    result = engine.query(
        "What was the price of honey in Alabama in 2010?", session=session, store=store
    )
    return store, session, result


class TestStepBack:
    def test_one_step_exposes_the_averaged_series(self, engine, session_with_query):
        _, session, result = session_with_query
        node_id, value, spec = step_back(session, result.graph_id, 1, engine.viz_model)
        assert "project" in node_id
        assert value.kind == "series"
        assert [p[1] for p in value.points] == [2.4]
        assert spec.binding.get("reference_line") == pytest.approx(2.4)

    def test_zero_steps_returns_sink(self, engine, session_with_query):
        _, session, result = session_with_query
        node_id, value, spec = step_back(session, result.graph_id, 0, engine.viz_model)
        assert node_id == result.graph.sink
        assert value.kind == "scalar"

    def test_out_of_range(self, engine, session_with_query):
        _, session, result = session_with_query
        with pytest.raises(StepRangeError):
            step_back(session, result.graph_id, 99, engine.viz_model)

    def test_consecutive_steps_compose(self, engine, session_with_query):
        store, session, result = session_with_query
        a1, _, _ = step_back(session, result.graph_id, 1, engine.viz_model)
        a2, _, _ = step_back(session, result.graph_id, 1, engine.viz_model)
        session.cursor = (result.graph_id, result.graph.sink)
        b2, _, _ = step_back(session, result.graph_id, 2, engine.viz_model)
        assert a2 == b2

    def test_cursor_stays_on_trace_nodes(self, engine, session_with_query):
        _, session, result = session_with_query
        step_back(session, result.graph_id, 2, engine.viz_model)
        graph_id, node_id = session.cursor
        assert graph_id == result.graph_id
        assert node_id in result.trace.results

    def test_jump_to_named_node(self, engine, session_with_query):
        _, session, result = session_with_query
        target = result.graph.nodes[0].id
        node_id, value, _ = jump_to_node(session, result.graph_id, target, engine.viz_model)
        assert node_id == target
        assert value.kind == "table"


class TestSessionStore:
    def test_find_graph_across_sessions(self, engine):
        store = SessionStore()
        s1 = store.create()
        r1 = engine.query("honey price in Texas in 2005", session=s1, store=store)
        found_session, entry = store.find_graph(r1.graph_id)
        assert found_session.session_id == s1.session_id
        assert entry.answer.kind == "scalar"

    def test_ttl_purges_idle_sessions(self, engine):
        store = SessionStore(ttl_seconds=0.0)
        session = store.create()
        engine.query("honey price in Texas in 2005", session=session, store=store)
        import time

        time.sleep(0.01)
        with pytest.raises(Exception):
            store.get(session.session_id)

    def test_snapshot_writes_history(self, engine, tmp_path):
        store = SessionStore()
        session = store.create()
        engine.query("honey price in Texas in 2005", session=session, store=store)
        path = tmp_path / "sessions.json"
        store.snapshot(path)
        import json

        doc = json.loads(path.read_text())
        assert session.session_id in doc
        assert doc[session.session_id]["history"][0]["answer"]["kind"] == "scalar"


class TestOverlay:
    def test_series_plus_scalar_gets_reference_line(self, viz_model):
        inter = series([(2000, 1.0), (2001, 3.0)], "temporal", unit="lb")
        final = scalar(2.0, "lb")
        spec = overlay(final, inter, viz_model)
        assert spec.viz_type == "line_chart"
        assert spec.binding["reference_line"] == 2.0

    def test_two_series_same_labels_combine(self, viz_model):
        a = series([(2000, 1.0), (2001, 3.0)], "temporal", name="first")
        b = series([(2000, 2.0), (2001, 2.5)], "temporal", name="second")
        spec = overlay(b, a, viz_model)
        assert spec.binding["overlay_series"]["name"] == "second"
        assert spec.stacked == []

    def test_forecast_over_history_marks_prediction(self, engine, viz_model):
        result = engine.query(
            "How will the average honey price develop in Florida next year?"
        )
        history = result.answer.history
        spec = overlay(result.answer, history, viz_model)
        assert spec.viz_type == "line_chart"
        assert spec.binding["predicted_from"] == result.answer.predicted[0][0]

    def test_scalar_pair_stacks_kpi_cards(self, viz_model):
        spec = overlay(scalar(1.0), scalar(2.0), viz_model)
        assert spec.viz_type == "kpi_card"
        assert spec.stacked and spec.stacked[0].viz_type == "kpi_card"

    def test_overlay_is_pure(self, viz_model):
        inter = series([(2000, 1.0)], "temporal")
        final = scalar(2.0)
        before = (inter.to_json(), final.to_json())
        overlay(final, inter, viz_model)
        assert (inter.to_json(), final.to_json()) == before
