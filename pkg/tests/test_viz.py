import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asktable.values import TableColumn, Value, scalar, series
from asktable.viz import (
    FEATURE_DIM,
    VIZ_TYPES,
    VizModel,
    compatible,
    featurize,
    knn_k,
    leave_one_out_top3,
    load_compat_matrix,
    predict_topk,
    recommend,
    zeror_topn,
)


def geo(n):
    return Value(
        kind="geo_series",
        points=[(f"S{i:02d}", float(i)) for i in range(n)],
        unit="lb",
    )


def fixture_model():
    # four examples, two identical bar-labeled points near the query
    examples = [
        (featurize(series([("a", 1.0), ("b", 2.0)], "categorical")), "bar_chart"),
        (featurize(series([("c", 1.0), ("d", 5.0)], "categorical")), "bar_chart"),
        (featurize(scalar(3.0)), "kpi_card"),
        (featurize(Value(kind="table", schema=[TableColumn("x", "numerical")], rows=[(1,)])), "table_view"),
    ]
    return VizModel(examples)


class TestFeaturize:
    def test_dimension_fixed(self):
        for value in (scalar(1.0), geo(3), series([(2000, 1.0)], "temporal")):
            assert featurize(value).shape == (FEATURE_DIM,)

    def test_scalar_features(self):
        f = featurize(scalar(2.4))
        assert f[0] == 1.0  # scalar one-hot
        assert f[13] == 1.0  # single value
        others = [f[i] for i in range(FEATURE_DIM) if i not in (0, 13)]
        assert all(x == 0.0 for x in others)

    def test_geo_series_of_44_states(self):
        f = featurize(geo(44))
        assert f[11] == 1.0  # has_geo
        assert f[12] == float(min(4, int(math.log10(44))))  # cardinality bucket
        assert f[8] == 1.0  # size bucket for 44 points

    def test_temporal_series_flags(self):
        f = featurize(series([(2000, 1.0), (2001, 2.0)], "temporal"))
        assert f[10] == 1.0 and f[11] == 0.0

    def test_all_features_finite(self, viz_model):
        for features, _ in viz_model.examples:
            assert np.all(np.isfinite(features))

    def test_flags_are_binary(self, viz_model):
        for features, _ in viz_model.examples:
            for j in list(range(8)) + [10, 11, 13]:
                assert features[j] in (0.0, 1.0)


class TestKnn:
    @pytest.mark.parametrize("n,expected", [(1, 1), (4, 2), (9, 3), (100, 10), (10000, 100)])
    def test_k_rule_exact(self, n, expected):
        assert knn_k(n) == expected

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=1, max_value=10_000))
    def test_k_rule_property(self, n):
        assert knn_k(n) == max(1, round(math.sqrt(n)))

    def test_four_example_fixture_votes(self):
        model = fixture_model()
        query = featurize(series([("x", 1.0), ("y", 3.0)], "categorical"))
        ranked = predict_topk(model, query, k_out=3)
        # k = round(sqrt(4)) = 2; both nearest neighbors are bar_chart
        assert ranked[0] == ("bar_chart", 2)

    def test_single_example_predicts_it(self):
        model = VizModel([(featurize(scalar(1.0)), "kpi_card")])
        assert predict_topk(model, featurize(scalar(9.0)), 3) == [("kpi_card", 1)]

    def test_votes_sum_at_most_k(self, viz_model):
        k = knn_k(len(viz_model))
        ranked = predict_topk(viz_model, featurize(scalar(1.0)), 3)
        assert sum(v for _, v in ranked) <= k
        assert len(ranked) <= 3
        assert len({t for t, _ in ranked}) == len(ranked)

    def test_deterministic(self, viz_model):
        query = featurize(geo(18))
        assert predict_topk(viz_model, query, 3) == predict_topk(viz_model, query, 3)

    def test_empty_model_is_error(self):
        with pytest.raises(ValueError):
            predict_topk(VizModel([]), featurize(scalar(1.0)), 3)


class TestCompatibility:
    def test_text_answer_always_compatible(self, viz_model):
        matrix = load_compat_matrix()
        for value in (scalar(1.0), geo(5), Value(kind="text", text="x")):
            assert compatible("text_answer", value, matrix)

    def test_geo_heatmap_needs_location(self):
        matrix = load_compat_matrix()
        assert compatible("geo_heatmap", geo(3), matrix)
        plain_table = Value(
            kind="table", schema=[TableColumn("x", "numerical")], rows=[(1,)]
        )
        assert not compatible("geo_heatmap", plain_table, matrix)
        geo_table = Value(
            kind="table",
            schema=[TableColumn("s", "location"), TableColumn("x", "numerical")],
            rows=[("Texas", 1.0)],
        )
        assert compatible("geo_heatmap", geo_table, matrix)

    def test_kpi_card_rejects_series(self):
        matrix = load_compat_matrix()
        assert not compatible("kpi_card", series([(2000, 1.0)], "temporal"), matrix)


class TestRecommend:
    def test_scalar_with_table_modality_pins_rank_one(self, viz_model):
        spec = recommend(scalar(2.4, "USD/lb"), "table_view", viz_model)
        assert spec.viz_type == "table_view"
        assert spec.ranking[0][0] == "table_view"
        assert len(spec.ranking) <= 3
        assert len({v for v, _ in spec.ranking}) == len(spec.ranking)

    def test_incompatible_modality_ignored_with_diagnostic(self, viz_model):
        plain_table = Value(
            kind="table", schema=[TableColumn("x", "numerical")], rows=[(1,)]
        )
        spec = recommend(plain_table, "geo_heatmap", viz_model)
        assert spec.viz_type != "geo_heatmap"
        assert any("geo_heatmap" in d for d in spec.diagnostics)

    def test_geo_result_reaches_geo_heatmap(self, viz_model):
        spec = recommend(geo(18), None, viz_model)
        assert "geo_heatmap" in [v for v, _ in spec.ranking]

    def test_ranking_never_incompatible(self, viz_model):
        matrix = load_compat_matrix()
        for value in (scalar(1.0), geo(5), series([(2000, 1.0), (2001, 2.0)], "temporal")):
            for modality in (None, "geo_heatmap", "kpi_card", "pie_chart"):
                spec = recommend(value, modality, viz_model, matrix)
                for viz_type, _ in spec.ranking:
                    assert compatible(viz_type, value, matrix)

    def test_pin_survives_for_all_compatible_types(self, viz_model):
        matrix = load_compat_matrix()
        value = geo(18)
        for viz_type in VIZ_TYPES:
            spec = recommend(value, viz_type, viz_model, matrix)
            if compatible(viz_type, value, matrix):
                assert spec.ranking[0][0] == viz_type

    def test_wire_round_trip(self, viz_model):
        from asktable.viz import VizSpec

        spec = recommend(geo(18), "bar_chart", viz_model)
        rebuilt = VizSpec.from_dict(spec.to_dict())
        assert rebuilt.to_dict() == spec.to_dict()


class TestModelQuality:
    def test_leave_one_out_beats_zeror(self, viz_model):
        labels = [label for _, label in viz_model.examples]
        zeror3 = zeror_topn(labels, 3)
        zeror_acc = sum(1 for l in labels if l in zeror3) / len(labels)
        assert leave_one_out_top3(viz_model) > zeror_acc

    def test_zeror_counting(self):
        assert zeror_topn(["a", "a", "b"], 1) == ["a"]
        ranked = zeror_topn(["a", "a", "b", "b", "c"], 3)
        assert set(ranked) == {"a", "b", "c"}

    def test_model_file_round_trip(self, viz_model, tmp_path):
        path = tmp_path / "model.json"
        viz_model.save(path)
        loaded = VizModel.from_file(path)
        assert len(loaded) == len(viz_model)
        query = featurize(scalar(1.0))
        assert predict_topk(loaded, query, 3) == predict_topk(viz_model, query, 3)
