import pytest

from asktable.annotate import annotate, extract_modality, tokenize
from asktable.dataset import load_dataset
from asktable.errors import AnnotationError

PRICE_QUESTION = "What was the price of honey in Alabama in 2010?"


def anchor_summary(phrase):
    out = []
    for a in phrase.anchors:
        if a.kind == "column":
            out.append(("column", a.column))
        elif a.kind == "value":
            out.append(("value", a.column, a.value))
        elif a.kind == "temporal":
            out.append(("temporal", a.year))
        elif a.kind == "numeric":
            out.append(("numeric", a.number))
        else:
            out.append((a.kind,))
    return out


class TestTokens:
    def test_spans_ordered_and_non_overlapping(self, dataset, annotator_config):
        phrase = annotate(PRICE_QUESTION, dataset, annotator_config)
        previous_end = -1
        for token in phrase.tokens:
            assert token.start >= previous_end
            assert token.end > token.start
            previous_end = token.end

    def test_lemma_non_empty_for_words(self, dataset, annotator_config):
        phrase = annotate(PRICE_QUESTION, dataset, annotator_config)
        for token in phrase.tokens:
            if token.tag != "symbol":
                assert token.lemma

    def test_number_and_symbol_tags(self, annotator_config):
        tokens = tokenize("price > 2.5, ok?", annotator_config)
        tags = {t.surface: t.tag for t in tokens}
        assert tags["2.5"] == "number"
        assert tags[">"] == "symbol"
        assert tags[","] == "symbol"

    def test_trailing_comma_not_part_of_number(self, annotator_config):
        tokens = tokenize("Alabama 2010, in a table", annotator_config)
        assert [t.surface for t in tokens][1] == "2010"

    def test_empty_input_raises(self, dataset, annotator_config):
        with pytest.raises(AnnotationError):
            annotate("   ", dataset, annotator_config)


class TestAnchors:
    def test_price_question_anchors(self, dataset, annotator_config):
        phrase = annotate(PRICE_QUESTION, dataset, annotator_config)
        summary = anchor_summary(phrase)
        assert ("column", "priceperlb") in summary
        assert ("value", "state", "Alabama") in summary
        assert ("temporal", 2010) in summary

    def test_relative_year_resolution(self, dataset, annotator_config):
        phrase = annotate(
            "What did honey cost in Alabama ten years ago?", dataset, annotator_config
        )
        assert ("temporal", 2010) in anchor_summary(phrase)

    def test_next_year_is_future(self, dataset, annotator_config):
        phrase = annotate("price in Florida next year", dataset, annotator_config)
        future = [a for a in phrase.anchors if a.kind == "temporal"]
        assert future and future[0].relative_future
        assert future[0].future_offset == 1

    def test_bare_year_is_single_anchor(self, dataset, annotator_config):
        phrase = annotate("2010", dataset, annotator_config)
        assert anchor_summary(phrase) == [("temporal", 2010)]
        assert phrase.content_spans == []

    def test_usps_code_binds_state(self, dataset, annotator_config):
        phrase = annotate("honey price in AL", dataset, annotator_config)
        assert ("value", "state", "Alabama") in anchor_summary(phrase)

    def test_longest_match_wins(self, tmp_path, annotator_config):
        csv = tmp_path / "t.csv"
        csv.write_text("a\n1\n")
        schema = tmp_path / "s.json"
        schema.write_text(
            '{"a": {"aliases": ["unit price", "unit price index"]}}'
        )
        ds = load_dataset(csv, schema)
        phrase = annotate("show the unit price index now", ds, annotator_config)
        spans = [(a.first, a.last) for a in phrase.anchors if a.kind == "column"]
        assert len(spans) == 1
        first, last = spans[0]
        assert last - first == 2  # three tokens consumed by the longer alias

    def test_word_number_is_numeric_anchor(self, dataset, annotator_config):
        phrase = annotate("top five states", dataset, annotator_config)
        assert ("numeric", 5.0) in anchor_summary(phrase)

    def test_embedding_fallback_binds_column(self, dataset, annotator_config):
        phrase = annotate("where was honey expensive", dataset, annotator_config)
        assert ("column", "priceperlb") in anchor_summary(phrase)


class TestCaseAndIdempotence:
    @pytest.mark.parametrize(
        "text",
        [
            PRICE_QUESTION,
            "Top 5 states by honey production in 2011",
            "Compare the price in Alabama and Georgia in 2010",
        ],
    )
    def test_lowercase_yields_identical_anchors(self, dataset, annotator_config, text):
        a = anchor_summary(annotate(text, dataset, annotator_config))
        b = anchor_summary(annotate(text.lower(), dataset, annotator_config))
        assert a == b

    def test_reannotating_surface_text_is_stable(self, dataset, annotator_config):
        text = "what was the price of honey in alabama in 2010"
        first = annotate(text, dataset, annotator_config)
        rebuilt = " ".join(t.surface for t in first.tokens)
        second = annotate(rebuilt, dataset, annotator_config)
        assert anchor_summary(first) == anchor_summary(second)


class TestModality:
    def test_table_trigger(self, dataset, annotator_config):
        phrase = annotate("show me alabama as a table", dataset, annotator_config)
        assert extract_modality(phrase) == "table_view"

    def test_map_trigger(self, dataset, annotator_config):
        phrase = annotate("production per state on a map", dataset, annotator_config)
        assert extract_modality(phrase) == "geo_heatmap"

    def test_longest_trigger_wins(self, dataset, annotator_config):
        phrase = annotate("geographic heat map of production", dataset, annotator_config)
        assert extract_modality(phrase) == "geo_heatmap"
        phrase = annotate("heat map of production", dataset, annotator_config)
        assert extract_modality(phrase) == "matrix_heatmap"

    def test_geo_question_has_no_explicit_modality(self, dataset, annotator_config):
        phrase = annotate(
            "where is the state with the highest production output located?",
            dataset,
            annotator_config,
        )
        assert extract_modality(phrase) is None

    def test_plain_question_has_no_modality(self, dataset, annotator_config):
        phrase = annotate(PRICE_QUESTION, dataset, annotator_config)
        assert extract_modality(phrase) is None


class TestContentSpans:
    def test_anchor_tokens_excluded(self, dataset, annotator_config):
        phrase = annotate(PRICE_QUESTION, dataset, annotator_config)
        anchor_tokens = phrase.anchor_token_indices()
        for span in phrase.content_spans:
            assert not (set(span.token_indices) & anchor_tokens)

    def test_heads_marked(self, dataset, annotator_config):
        phrase = annotate(
            "compare the average price in Alabama and Georgia", dataset, annotator_config
        )
        for span in phrase.content_spans:
            if span.head_index is not None:
                assert phrase.tokens[span.head_index].tag in ("noun", "verb")
