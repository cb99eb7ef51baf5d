import pytest

from asktable.annotate import annotate
from asktable.errors import (
    DegenerateFitError,
    EmptyAggregationError,
    ExecutionError,
)
from asktable.executor import (
    execute,
    op_aggregate,
    op_compare,
    op_detect_anomalies,
    op_filter,
    op_forecast,
    op_lookup,
    op_project,
    op_scan,
    op_top_k,
)
from asktable.graph import BuilderConfig, build, select
from asktable.values import Value, scalar, series


def run(text, dataset, registry, annotator_config, embeddings):
    phrase = annotate(text, dataset, annotator_config)
    graph = select(build(phrase, registry, dataset, BuilderConfig(), embeddings))
    return graph, execute(graph, dataset)


def temporal_series(values, start=2000, unit=None):
    return series([(start + i, v) for i, v in enumerate(values)], "temporal", unit=unit)


class TestEndToEnd:
    def test_alabama_price_is_2_4(self, dataset, registry, annotator_config, embeddings):
        _, (answer, _) = run(
            "What was the price of honey in Alabama in 2010?",
            dataset, registry, annotator_config, embeddings,
        )
        assert answer.kind == "scalar"
        assert answer.value == pytest.approx(2.4, abs=0.005)
        assert answer.unit == "USD/lb"

    def test_scan_only_graph_returns_table(self, dataset, registry, annotator_config, embeddings):
        _, (answer, _) = run(
            "show the honey rows", dataset, registry, annotator_config, embeddings
        )
        assert answer.kind == "table"
        assert len(answer.rows) == len(dataset.rows)

    def test_florida_forecast_extends_history(
        self, dataset, registry, annotator_config, embeddings
    ):
        _, (answer, _) = run(
            "How will the average honey price develop in Florida next year?",
            dataset, registry, annotator_config, embeddings,
        )
        assert answer.kind == "forecast"
        last_history = max(p[0] for p in answer.history.points)
        assert [p[0] for p in answer.predicted] == [last_history + 1]

    def test_trace_has_entry_per_node(self, dataset, registry, annotator_config, embeddings):
        graph, (_, trace) = run(
            "What was the price of honey in Alabama in 2010?",
            dataset, registry, annotator_config, embeddings,
        )
        assert set(trace.results) == {n.id for n in graph.nodes}
        assert trace.order == [n.id for n in graph.nodes]

    def test_runtime_error_carries_node_id(self, dataset, registry, annotator_config, embeddings):
        # no rows for this state/year pair exist after 2012, so the mean
        # aggregation runs empty
        phrase = annotate(
            "average price in Alabama in 2012", dataset, annotator_config
        )
        graph = select(build(phrase, registry, dataset, BuilderConfig(), embeddings))
        bad = graph
        for node in bad.nodes:
            if node.function == "filter" and node.bound_params.get("column") == "year":
                node.bound_params["literal"] = 1901
        with pytest.raises(ExecutionError) as err:
            execute(bad, dataset)
        assert err.value.node_id is not None


class TestAggregate:
    def test_mean(self):
        out = op_aggregate([temporal_series([2, 4, 6])], {"fn": "mean"}, None)
        assert out.value == 4.0

    def test_sum_of_empty_is_zero(self):
        empty = Value(kind="series", points=[], label_kind="numerical")
        assert op_aggregate([empty], {"fn": "sum"}, None).value == 0.0
        assert op_aggregate([empty], {"fn": "count"}, None).value == 0.0

    @pytest.mark.parametrize("fn", ["mean", "min", "max"])
    def test_empty_mean_min_max_raise(self, fn):
        empty = Value(kind="series", points=[], label_kind="numerical")
        with pytest.raises(EmptyAggregationError):
            op_aggregate([empty], {"fn": fn}, None)

    def test_count_drops_unit(self):
        out = op_aggregate([temporal_series([1, 2], unit="lb")], {"fn": "count"}, None)
        assert out.value == 2.0 and out.unit is None

    def test_mean_keeps_unit(self):
        out = op_aggregate([temporal_series([1, 2], unit="lb")], {"fn": "mean"}, None)
        assert out.unit == "lb"


class TestForecast:
    def test_exact_line(self):
        history = series([(1, 1.0), (2, 2.0), (3, 3.0)], "temporal")
        out = op_forecast([history], {"horizon": 1}, None)
        (label, predicted, stderr) = out.predicted[0]
        assert label == 4
        assert predicted == pytest.approx(4.0)
        assert stderr == pytest.approx(0.0)

    def test_constant_series(self):
        history = series([(2000, 5.0), (2001, 5.0)], "temporal")
        out = op_forecast([history], {"horizon": 1}, None)
        assert out.predicted[0][1] == pytest.approx(5.0)

    def test_horizon_emits_that_many_points(self):
        history = series([(2000, 1.0), (2001, 3.0), (2002, 2.0)], "temporal")
        out = op_forecast([history], {"horizon": 3}, None)
        assert [p[0] for p in out.predicted] == [2003, 2004, 2005]

    def test_single_point_is_degenerate(self):
        history = series([(2000, 1.0)], "temporal")
        with pytest.raises(DegenerateFitError):
            op_forecast([history], {"horizon": 1}, None)

    def test_identical_labels_are_degenerate(self):
        history = Value(
            kind="series", points=[("2000", 1.0)], label_kind="temporal"
        )
        with pytest.raises(DegenerateFitError):
            op_forecast([history], {"horizon": 1}, None)

    def test_predicted_labels_extend_history(self):
        history = series([(2000, 1.0), (2005, 2.0)], "temporal")
        out = op_forecast([history], {"horizon": 2}, None)
        history_labels = {p[0] for p in out.history.points}
        for label, _, _ in out.predicted:
            assert label not in history_labels


class TestAnomalies:
    def test_spec_example_thresholds(self):
        values = series([(0, 1.0), (1, 1.0), (2, 1.0), (3, 100.0)], "numerical")
        relaxed = op_detect_anomalies([values], {"threshold": 2.5}, None)
        assert relaxed.flagged == []
        strict = op_detect_anomalies([values], {"threshold": 1.5}, None)
        assert strict.flagged == [3]

    def test_constant_series_never_flags(self):
        values = temporal_series([7.0, 7.0, 7.0, 7.0])
        out = op_detect_anomalies([values], {"threshold": 0.1}, None)
        assert out.flagged == []

    def test_too_few_points(self):
        values = temporal_series([1.0, 2.0])
        with pytest.raises(ExecutionError):
            op_detect_anomalies([values], {"threshold": 2.5}, None)

    def test_report_carries_inputs(self):
        values = temporal_series([1.0, 2.0, 50.0, 1.5])
        out = op_detect_anomalies([values], {"threshold": 1.2}, None)
        assert out.series is values
        assert out.threshold == 1.2


class TestTableOps:
    def table(self, dataset):
        return op_scan([], {}, dataset)

    def test_filter_soundness(self, dataset):
        table = self.table(dataset)
        out = op_filter([table], {"column": "state", "op": "=", "literal": "Alabama"}, dataset)
        idx = dataset.column_index("state")
        assert out.rows and all(r[idx] == "Alabama" for r in out.rows)

    def test_filter_commutes(self, dataset):
        table = self.table(dataset)
        ab = op_filter(
            [op_filter([table], {"column": "state", "op": "=", "literal": "Texas"}, dataset)],
            {"column": "year", "op": ">", "literal": 2005},
            dataset,
        )
        ba = op_filter(
            [op_filter([table], {"column": "year", "op": ">", "literal": 2005}, dataset)],
            {"column": "state", "op": "=", "literal": "Texas"},
            dataset,
        )
        assert sorted(map(str, ab.rows)) == sorted(map(str, ba.rows))

    def test_filter_between_inclusive(self, dataset):
        table = self.table(dataset)
        out = op_filter(
            [table], {"column": "year", "op": "between", "literal": [2000, 2002]}, dataset
        )
        years = {r[dataset.column_index("year")] for r in out.rows}
        assert years == {2000, 2001, 2002}

    def test_project_location_labels_become_codes(self, dataset):
        table = op_filter([self.table(dataset)], {"column": "year", "op": "=", "literal": 2010}, dataset)
        out = op_project([table], {"column": "priceperlb", "label_column": "state"}, dataset)
        assert out.kind == "geo_series"
        labels = {p[0] for p in out.points}
        assert "AL" in labels and all(len(l) == 2 for l in labels)

    def test_project_duplicate_labels_fail(self, dataset):
        table = self.table(dataset)
        with pytest.raises(ExecutionError):
            op_project([table], {"column": "priceperlb", "label_column": "state"}, dataset)

    def test_top_k_direction_and_ties(self):
        values = series([("a", 3.0), ("b", 1.0), ("c", 3.0), ("d", 2.0)], "categorical")
        top = op_top_k([values], {"k": 2, "direction": "top"}, None)
        assert [p[0] for p in top.points] == ["a", "c"]
        bottom = op_top_k([values], {"k": 1, "direction": "bottom"}, None)
        assert [p[0] for p in bottom.points] == ["b"]

    def test_lookup_single_row(self, dataset):
        table = op_filter([self.table(dataset)], {"column": "state", "op": "=", "literal": "Alabama"}, dataset)
        table = op_filter([table], {"column": "year", "op": "=", "literal": 2010}, dataset)
        out = op_lookup([table], {"column": "state"}, dataset)
        assert out.kind == "text" and out.text == "Alabama"
        price = op_lookup([table], {"column": "priceperlb"}, dataset)
        assert price.kind == "scalar" and price.value == pytest.approx(2.4)

    def test_lookup_requires_exactly_one_row(self, dataset):
        with pytest.raises(ExecutionError):
            op_lookup([self.table(dataset)], {"column": "state"}, dataset)

    def test_compare_subtracts(self):
        out = op_compare([scalar(5.0, "lb"), scalar(3.0, "lb")], {}, None)
        assert out.value == 2.0 and out.unit == "lb"
        mixed = op_compare([scalar(5.0, "lb"), scalar(3.0, "USD")], {}, None)
        assert mixed.unit is None
