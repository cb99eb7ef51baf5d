import json

import pytest

from asktable.annotate import annotate
from asktable.errors import BuilderError, UnintelligibleRequestError
from asktable.graph import (
    BuilderConfig,
    OperationGraph,
    OperationNode,
    build,
    from_wire,
    rank,
    select,
    to_wire,
    to_wire_json,
    validate,
)
from asktable.values import ValueKind

PRICE_QUESTION = "What was the price of honey in Alabama in 2010?"
FORECAST_QUESTION = "How will the average honey price develop in Florida next year?"


def compile_ranked(text, dataset, registry, annotator_config, embeddings, **cfg):
    phrase = annotate(text, dataset, annotator_config)
    return build(phrase, registry, dataset, BuilderConfig(**cfg), embeddings)


class TestBuildExamples:
    def test_price_lookup_chain(self, dataset, registry, annotator_config, embeddings):
        graphs = compile_ranked(PRICE_QUESTION, dataset, registry, annotator_config, embeddings)
        g = select(graphs)
        functions = [n.function for n in g.nodes]
        assert functions == ["scan", "filter", "filter", "project", "aggregate"]
        filters = [n.bound_params for n in g.nodes if n.function == "filter"]
        assert {"column": "state", "op": "=", "literal": "Alabama"} in filters
        assert {"column": "year", "op": "=", "literal": 2010} in filters
        agg = [n for n in g.nodes if n.function == "aggregate"][0]
        assert agg.bound_params == {"fn": "mean"}
        assert g.node(g.sink).output_kind == ValueKind("scalar")
        assert g.complete

    def test_price_lookup_document_counts(self, dataset, registry, annotator_config, embeddings):
        g = select(compile_ranked(PRICE_QUESTION, dataset, registry, annotator_config, embeddings))
        doc = to_wire(g)
        assert len(doc["nodes"]) == 5
        assert len(doc["edges"]) == 4

    def test_forecast_chain(self, dataset, registry, annotator_config, embeddings):
        g = select(compile_ranked(FORECAST_QUESTION, dataset, registry, annotator_config, embeddings))
        functions = [n.function for n in g.nodes]
        assert functions == ["scan", "filter", "group_aggregate", "forecast"]
        group = [n for n in g.nodes if n.function == "group_aggregate"][0]
        assert group.bound_params == {
            "fn": "mean", "key_column": "year", "value_column": "priceperlb",
        }
        forecast = g.node(g.sink)
        assert forecast.bound_params == {"horizon": 1}

    def test_single_anchor_yields_partial_fallback(
        self, dataset, registry, annotator_config, embeddings
    ):
        graphs = compile_ranked("Alabama", dataset, registry, annotator_config, embeddings)
        g = select(graphs)
        assert [n.function for n in g.nodes] == ["scan", "filter"]
        assert not g.complete

    def test_unintelligible_request(self, dataset, registry, annotator_config, embeddings):
        with pytest.raises(UnintelligibleRequestError) as err:
            compile_ranked("asdf qwer zzz", dataset, registry, annotator_config, embeddings)
        assert "tokens" in err.value.diagnostics

    def test_compare_builds_two_branches(self, dataset, registry, annotator_config, embeddings):
        g = select(compile_ranked(
            "Compare the average price of honey in Alabama and Georgia in 2010",
            dataset, registry, annotator_config, embeddings,
        ))
        assert g.node(g.sink).function == "compare"
        assert len(g.node(g.sink).input_edges) == 2
        scans = [n for n in g.nodes if n.function == "scan"]
        assert len(scans) == 1  # shared leaf across both branches


class TestGraphInvariants:
    @pytest.mark.parametrize(
        "text",
        [
            PRICE_QUESTION,
            FORECAST_QUESTION,
            "Top 5 states by honey production in 2011",
            "Are there anomalies in the honey production of Georgia?",
            "Show me the production per state in 2010 on a map",
            "How many years had a price above 2 dollars in Alabama?",
        ],
    )
    def test_all_candidates_validate(
        self, dataset, registry, annotator_config, embeddings, text
    ):
        for g in compile_ranked(text, dataset, registry, annotator_config, embeddings):
            assert validate(g, registry, dataset) == []

    def test_determinism(self, dataset, registry, annotator_config, embeddings):
        first = compile_ranked(FORECAST_QUESTION, dataset, registry, annotator_config, embeddings)
        second = compile_ranked(FORECAST_QUESTION, dataset, registry, annotator_config, embeddings)
        assert [to_wire_json(g) for g in first] == [to_wire_json(g) for g in second]

    def test_beam_monotonicity(self, dataset, registry, annotator_config, embeddings):
        text = "Top 5 states by honey production in 2011"
        selected_signatures = {}
        candidate_sets = {}
        for beam in (2, 4, 8, 16):
            graphs = compile_ranked(
                text, dataset, registry, annotator_config, embeddings, beam_width=beam
            )
            selected_signatures[beam] = to_wire_json(select(graphs))
            candidate_sets[beam] = {to_wire_json(g) for g in graphs}
        beams = [2, 4, 8, 16]
        for small, big in zip(beams, beams[1:]):
            assert selected_signatures[small] in candidate_sets[big]

    def test_exactly_one_sink(self, dataset, registry, annotator_config, embeddings):
        for g in compile_ranked(PRICE_QUESTION, dataset, registry, annotator_config, embeddings):
            outgoing = {frm for frm, _, _ in g.edges}
            sinks = [n.id for n in g.nodes if n.id not in outgoing]
            assert sinks == [g.sink]

    def test_node_inputs_match_required_slots(
        self, dataset, registry, annotator_config, embeddings
    ):
        for g in compile_ranked(FORECAST_QUESTION, dataset, registry, annotator_config, embeddings):
            for node in g.nodes:
                spec = registry.get(node.function)
                assert len(node.input_edges) == len(spec.required_inputs)


class TestSelection:
    def _graph(self, complete, relevance, depth, n_nodes=3, tag="g"):
        nodes = [
            OperationNode(
                id=f"n{i}_{tag}",
                function="scan",
                bound_params={},
                input_edges=[],
                match_score=1.0,
                consumed_spans=[],
                output_kind=ValueKind("table"),
            )
            for i in range(n_nodes)
        ]
        edges = [(f"n{i}_{tag}", f"n{i+1}_{tag}", 0) for i in range(n_nodes - 1)]
        return OperationGraph(
            nodes=nodes,
            edges=edges,
            sink=f"n{n_nodes-1}_{tag}",
            depth=depth,
            relevance=relevance,
            complete=complete,
        )

    def test_complete_beats_deeper_incomplete(self):
        complete = self._graph(True, relevance=0.8, depth=2)
        incomplete = self._graph(False, relevance=1.0, depth=9)
        assert select([incomplete, complete]) is complete

    def test_incomplete_ranked_by_depth(self):
        shallow = self._graph(False, relevance=0.9, depth=3)
        deep = self._graph(False, relevance=0.1, depth=5)
        assert select([shallow, deep]) is deep

    def test_relevance_orders_complete(self):
        weak = self._graph(True, relevance=0.4, depth=2)
        strong = self._graph(True, relevance=0.9, depth=2)
        assert select([weak, strong]) is strong

    def test_fewer_nodes_breaks_relevance_tie(self):
        small = self._graph(True, relevance=0.8, depth=2, n_nodes=3)
        big = self._graph(True, relevance=0.8, depth=2, n_nodes=5)
        assert select([big, small]) is small

    def test_id_sequence_breaks_remaining_tie(self):
        a = self._graph(True, relevance=0.8, depth=2, tag="aaa")
        b = self._graph(True, relevance=0.8, depth=2, tag="bbb")
        assert select([b, a]) is a

    def test_empty_candidates_is_an_error(self):
        with pytest.raises(BuilderError):
            select([])

    def test_rank_is_stable_under_permutation(self):
        graphs = [
            self._graph(True, relevance=0.9, depth=2, tag="x"),
            self._graph(False, relevance=0.5, depth=4, tag="y"),
            self._graph(True, relevance=0.7, depth=2, tag="z"),
        ]
        order_a = [g.sink for g in rank(graphs)]
        order_b = [g.sink for g in rank(list(reversed(graphs)))]
        assert order_a == order_b


class TestWireFormat:
    def test_round_trip_is_byte_identical(self, dataset, registry, annotator_config, embeddings):
        g = select(compile_ranked(PRICE_QUESTION, dataset, registry, annotator_config, embeddings))
        first = to_wire_json(g)
        parsed = json.loads(first)
        rebuilt = from_wire(parsed, registry, dataset)
        second = json.dumps(to_wire(rebuilt), sort_keys=True, separators=(",", ":"))
        assert first == second

    def test_single_node_graph_serializes_empty_edges(
        self, dataset, registry, annotator_config, embeddings
    ):
        graphs = compile_ranked("show the honey rows", dataset, registry, annotator_config, embeddings)
        scan_only = [g for g in graphs if len(g.nodes) == 1]
        assert scan_only, "expected a bare scan candidate"
        doc = to_wire(scan_only[0])
        assert doc["edges"] == []

    def test_wire_contains_required_fields(self, dataset, registry, annotator_config, embeddings):
        g = select(compile_ranked(FORECAST_QUESTION, dataset, registry, annotator_config, embeddings))
        doc = to_wire(g)
        assert set(doc) == {"nodes", "edges", "sink", "depth", "relevance", "complete"}
        for node in doc["nodes"]:
            assert set(node) == {"id", "function", "params", "score"}
        for edge in doc["edges"]:
            assert set(edge) == {"from", "to", "slot"}

    def test_from_wire_resolves_kinds(self, dataset, registry, annotator_config, embeddings):
        g = select(compile_ranked(FORECAST_QUESTION, dataset, registry, annotator_config, embeddings))
        rebuilt = from_wire(to_wire(g), registry, dataset)
        assert rebuilt.node(rebuilt.sink).output_kind == ValueKind("forecast")
        assert validate(rebuilt, registry, dataset) == []
