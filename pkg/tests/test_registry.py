import json

import pytest
from hypothesis import given, strategies as st

from asktable.executor import EXECUTORS
from asktable.registry import (
    DEFAULT_TAU_FN,
    FunctionSpec,
    Keyword,
    Registry,
    builtin_registry,
    load_registry,
    match_function,
    match_term,
)
from asktable.values import ValueKind


class TestBuiltinRegistry:
    def test_contains_core_functions(self, registry):
        for fn_id in (
            "scan", "filter", "project", "aggregate", "group_aggregate",
            "top_k", "lookup", "compare", "forecast", "detect_anomalies",
        ):
            assert fn_id in registry

    def test_aggregate_outputs_scalar(self, registry):
        assert registry.get("aggregate").output == ValueKind("scalar")

    def test_forecast_takes_temporal_series(self, registry):
        slot = registry.get("forecast").inputs[0]
        assert slot.kind == ValueKind("series", "temporal")

    def test_scalar_producers_include_aggregate_lookup_compare(self, registry):
        producers = {f.id for f in registry.producers_of("scalar")}
        assert {"aggregate", "lookup", "compare"} <= producers

    def test_index_consistent_with_outputs(self, registry):
        for fn in registry.functions:
            assert fn in registry.producers_of(fn.output.kind)
        for kind, fns in registry.compatibility.items():
            for fn in fns:
                assert fn.output.kind == kind

    def test_every_executor_ref_is_registered(self, registry):
        for fn in registry.functions:
            assert fn.executor_ref in EXECUTORS

    def test_source_or_inputs(self, registry):
        for fn in registry.functions:
            assert fn.inputs or fn.is_source

    def test_keywords_non_empty(self, registry):
        for fn in registry.functions:
            assert fn.keywords

    def test_duplicate_ids_rejected(self, registry):
        fn = registry.get("scan")
        with pytest.raises(ValueError):
            Registry([fn, fn])


class TestMatchFunction:
    def test_exact_keyword_hit(self, registry, embeddings):
        score = match_function(["average"], registry.get("aggregate"), embeddings)
        assert score == 1.0

    def test_synonym_hit_scales_by_09(self, registry):
        spec = registry.get("aggregate")
        assert match_function(["avg"], spec) == pytest.approx(0.9 * spec.keywords["average"].weight)

    def test_embedding_paraphrase_passes_threshold(self, registry, embeddings):
        spec = registry.get("aggregate")
        score = match_function(["typical"], spec, embeddings)
        cos = embeddings.cosine("typical", "average")
        assert cos is not None and cos >= DEFAULT_TAU_FN
        assert score == pytest.approx(cos)

    def test_unrelated_word_scores_zero(self, registry, embeddings):
        assert match_function(["purple"], registry.get("forecast"), embeddings) == 0.0

    def test_scores_within_unit_interval(self, registry, embeddings):
        words = ["average", "total", "forecast", "purple", "top", "typical", "zzz"]
        for fn in registry.functions:
            for word in words:
                assert 0.0 <= match_function([word], fn, embeddings) <= 1.0

    def test_term_order_invariance(self, registry, embeddings):
        spec = registry.get("aggregate")
        a = match_function(["show", "average", "price"], spec, embeddings)
        b = match_function(["price", "show", "average"], spec, embeddings)
        assert a == b

    def test_monotone_in_keyword_weight(self):
        def spec_with(weight):
            return FunctionSpec(
                id="f",
                keywords={"foo": Keyword(weight)},
                output=ValueKind("scalar"),
                executor_ref="aggregate",
                inputs=[],
            )

        scores = [match_function(["foo"], spec_with(w)) for w in (0.2, 0.5, 0.9, 1.0)]
        assert scores == sorted(scores)

    def test_embedding_never_beats_exact_keyword_for_same_term(self, registry, embeddings):
        for spec in registry.functions:
            for kw, entry in spec.keywords.items():
                m = match_term(kw, spec, embeddings)
                assert m is not None
                assert m.score <= entry.weight + 1e-12

    def test_oov_token_falls_back_to_keywords(self, registry, embeddings):
        spec = registry.get("aggregate")
        assert "zzqq" not in embeddings
        assert match_function(["zzqq"], spec, embeddings) == 0.0
        assert match_function(["zzqq", "sum"], spec, embeddings) == 1.0

    @given(st.lists(st.sampled_from(
        ["average", "total", "top", "forecast", "purple", "house", "typical"]
    ), max_size=5))
    def test_score_bounds_property(self, terms):
        registry = builtin_registry()
        for fn in registry.functions:
            assert 0.0 <= match_function(terms, fn) <= 1.0


class TestManifestLoading:
    def test_manifest_extends_builtins(self, tmp_path):
        manifest = tmp_path / "registry.json"
        manifest.write_text(json.dumps([
            {
                "id": "median_aggregate",
                "keywords": {"median": 1.0},
                "inputs": [{"name": "values", "kind": "series"}],
                "params": [{"name": "fn", "literal_kind": "agg_fn", "default": "mean"}],
                "output": "scalar",
                "executor_ref": "aggregate",
            }
        ]))
        registry = load_registry(manifest)
        assert "median_aggregate" in registry
        assert "aggregate" in registry

    def test_manifest_rejects_unknown_executor(self, tmp_path):
        manifest = tmp_path / "registry.json"
        manifest.write_text(json.dumps([
            {
                "id": "evil",
                "keywords": {"evil": 1.0},
                "output": "scalar",
                "executor_ref": "arbitrary_code",
            }
        ]))
        with pytest.raises(ValueError, match="arbitrary_code"):
            load_registry(manifest)

    def test_synonym_must_map_to_keyword(self):
        with pytest.raises(ValueError):
            FunctionSpec(
                id="f",
                keywords={"a": Keyword(1.0)},
                output=ValueKind("scalar"),
                executor_ref="aggregate",
                synonyms={"b": "missing"},
            )

    def test_manifest_function_works_end_to_end(self, tmp_path):
        # a new AI function reaches execution without builder changes
        manifest = tmp_path / "registry.json"
        manifest.write_text(json.dumps([
            {
                "id": "strict_scan",
                "keywords": {"watchdog": 1.0},
                "inputs": [{"name": "values", "kind": "series"}],
                "params": [{"name": "threshold", "literal_kind": "float", "default": 3.0}],
                "output": "anomaly_report",
                "executor_ref": "detect_anomalies",
            }
        ]))
        from asktable.engine import Engine, EngineConfig

        engine = Engine(
            EngineConfig(reference_year=2020, registry_manifest=str(manifest))
        )
        result = engine.query("run the watchdog over the Georgia production")
        assert result.answer.kind == "anomaly_report"
        assert result.answer.threshold == 3.0
        assert any(n.function == "strict_scan" for n in result.graph.nodes)
