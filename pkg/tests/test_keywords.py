import numpy as np
import pytest

from pricemine.errors import NotFittedError
from pricemine.keywords import (
    HighlightedDocument,
    highlight,
    keyword_table,
    render_html,
    render_keyword_table,
)
from pricemine.pipeline import TwoStageModel
from pricemine.records import ClassifiedRecord, CleaningConfig
from pricemine.regressors import LinearModel
from pricemine.structured import LocationEncoder
from pricemine.text import TextConfig, TextVocabulary


def build_model(weights: dict[str, float], intercept: float = 0.0) -> TwoStageModel:
    """A hand-assembled model whose stage-2 weights are exactly `weights`."""
    terms = tuple(sorted(weights))
    vocabulary = TextVocabulary(
        terms=terms, doc_frequency=tuple(1 for _ in terms), corpus_size=max(len(terms), 1) + 1
    )
    stage1 = LinearModel(("beds", "baths", "size", "loc_somewhere"), np.zeros(4), 100_000.0)
    stage2 = LinearModel(terms, np.array([weights[t] for t in terms], dtype=float), intercept)
    return TwoStageModel(
        location_encoder=LocationEncoder(("somewhere",)),
        text_config=TextConfig(),
        vocabulary=vocabulary,
        kept_text_columns=terms,
        stage1=stage1,
        stage2=stage2,
        cleaning_config=CleaningConfig(),
    )


def record(text: str) -> ClassifiedRecord:
    return ClassifiedRecord("", text, 1, 1, 700, "somewhere", 1)


class TestKeywordTable:
    def test_top_one_each_side(self):
        model = build_model({"palm": 8000.0, "deal": -3000.0, "nice": -500.0})
        table = keyword_table(model, 1)
        assert table.positive == (("palm", 8000.0),)
        assert table.negative == (("deal", -3000.0),)

    def test_all_zero_weights_gives_empty_lists(self):
        model = build_model({"palm": 0.0, "deal": 0.0})
        table = keyword_table(model, 5)
        assert table.positive == () and table.negative == ()

    def test_orderings(self):
        model = build_model(
            {"alpha": 5.0, "bravo": 9.0, "carol": -2.0, "delta": -7.0, "echo1": 1.0}
        )
        table = keyword_table(model, 10)
        assert [t for t, _ in table.positive] == ["bravo", "alpha", "echo1"]
        assert [t for t, _ in table.negative] == ["delta", "carol"]

    def test_ties_break_lexicographically(self):
        model = build_model({"zeta": 4.0, "atom": 4.0, "mid": 4.0})
        table = keyword_table(model, 3)
        assert [t for t, _ in table.positive] == ["atom", "mid", "zeta"]

    def test_invariant_under_positive_rescaling(self):
        weights = {"alpha": 5.0, "bravo": 9.0, "carol": -2.0, "delta": -7.0}
        base = keyword_table(build_model(weights), 4)
        scaled = keyword_table(build_model({t: 3.5 * w for t, w in weights.items()}), 4)
        assert [t for t, _ in base.positive] == [t for t, _ in scaled.positive]
        assert [t for t, _ in base.negative] == [t for t, _ in scaled.negative]

    def test_top_k_validation_and_not_fitted(self):
        model = build_model({"palm": 1.0})
        with pytest.raises(ValueError):
            keyword_table(model, 0)
        with pytest.raises(NotFittedError):
            keyword_table(None, 3)

    def test_to_dict_layout(self):
        table = keyword_table(build_model({"palm": 2.0, "deal": -1.0}), 2)
        payload = table.to_dict()
        assert payload["positive"] == [{"term": "palm", "weight": 2.0}]
        assert payload["top_k"] == 2


class TestHighlight:
    def test_most_negative_token_is_pure_red(self):
        model = build_model({"jumeirah": -9000.0, "palm": 5000.0})
        doc = highlight(model, record("palm jumeirah views"))
        by_text = {t.text: t for t in doc.tokens}
        assert by_text["jumeirah"].color == (1.0, 0.0, 0.0)
        assert by_text["palm"].color[2] == pytest.approx(5000.0 / 9000.0)
        assert by_text["views"].color == (0.0, 0.0, 0.0)

    def test_unknown_tokens_black(self):
        model = build_model({"palm": 5000.0})
        doc = highlight(model, record("random words only"))
        assert all(t.color == (0.0, 0.0, 0.0) for t in doc.tokens)

    def test_half_intensity_blue(self):
        model = build_model({"alpha": 10.0, "beta": 5.0})
        doc = highlight(model, record("alpha beta"))
        by_text = {t.text: t for t in doc.tokens}
        assert by_text["alpha"].color == (0.0, 0.0, 1.0)
        assert by_text["beta"].color == (0.0, 0.0, 0.5)

    def test_short_and_stop_tokens_rendered_with_zero_score(self):
        model = build_model({"palm": 5.0})
        doc = highlight(model, record("at the palm of sea"))
        texts = [t.text for t in doc.tokens]
        assert texts == ["at", "the", "palm", "of", "sea"]
        scores = {t.text: t.score for t in doc.tokens}
        assert scores["at"] == 0.0 and scores["sea"] == 0.0 and scores["palm"] == 5.0

    def test_bigram_weight_covers_both_tokens_but_not_removed_gap(self):
        model = build_model({"palm_jumeirah": 7.0})
        doc = highlight(model, record("palm the jumeirah"))
        scores = {t.text: t.score for t in doc.tokens}
        assert scores["palm"] == 7.0
        assert scores["jumeirah"] == 7.0
        assert scores["the"] == 0.0

    def test_each_occurrence_scored(self):
        model = build_model({"palm": 4.0})
        doc = highlight(model, record("palm stuff palm"))
        palm_tokens = [t for t in doc.tokens if t.text == "palm"]
        assert len(palm_tokens) == 2
        assert all(t.score == 4.0 and t.color == (0.0, 0.0, 1.0) for t in palm_tokens)

    def test_title_tokens_included(self):
        model = build_model({"palm": 4.0})
        doc = highlight(
            model, ClassifiedRecord("palm tower", "city views", 1, 1, 700, "somewhere", 1)
        )
        assert [t.text for t in doc.tokens] == ["palm", "tower", "city", "views"]

    def test_score_sum_matches_occurrences_times_weight_times_length(self):
        model = build_model({"palm": 4.0, "palm_views": 6.0, "deal": -2.0})
        doc = highlight(model, record("palm views deal palm views"))
        # palm x2, palm_views x2 (bigram, covers 2 tokens), deal x1.
        expected = 2 * 4.0 * 1 + 2 * 6.0 * 2 + 1 * -2.0 * 1
        assert sum(t.score for t in doc.tokens) == pytest.approx(expected)

    def test_split_evenly_attribution(self):
        model = build_model({"palm_views": 6.0})
        doc = highlight(model, record("palm views"), attribution="split_evenly")
        scores = {t.text: t.score for t in doc.tokens}
        assert scores["palm"] == 3.0 and scores["views"] == 3.0

    def test_all_zero_document_entirely_black(self):
        model = build_model({"palm": 5.0})
        doc = highlight(model, record("nothing here matches at all"))
        assert all(t.color == (0.0, 0.0, 0.0) for t in doc.tokens)

    def test_max_intensity_is_exactly_one(self):
        model = build_model({"palm": 3.0, "deal": -11.0, "nice": 2.0})
        doc = highlight(model, record("palm deal nice palm"))
        peak = max(max(t.color) for t in doc.tokens)
        assert peak == 1.0

    def test_uppercase_text_still_matches_terms(self):
        model = build_model({"palm": 5.0})
        doc = highlight(
            model, ClassifiedRecord("", "Palm Jumeirah", 1, 1, 700, "somewhere", 1)
        )
        assert doc.tokens[0].text == "Palm"
        assert doc.tokens[0].score == 5.0

    def test_invalid_attribution(self):
        model = build_model({"palm": 5.0})
        with pytest.raises(ValueError):
            highlight(model, record("palm"), attribution="max")

    def test_feature_value_scoring_variant(self):
        model = build_model({"palm": 6.0, "deal": -4.0})
        doc = highlight(model, record("palm deal"), use_feature_values=True)
        scores = {t.text: t.score for t in doc.tokens}
        # F = (1, 1), |F| = sqrt(2); idf = ln(3/1) for both terms.
        value = (1.0 / np.sqrt(2.0)) * np.log(3.0)
        assert scores["palm"] == pytest.approx(6.0 * value, rel=1e-12)
        assert scores["deal"] == pytest.approx(-4.0 * value, rel=1e-12)

    def test_feature_value_variant_varies_per_document(self):
        model = build_model({"palm": 6.0, "deal": -4.0})
        lonely = highlight(model, record("palm"), use_feature_values=True)
        crowded = highlight(model, record("palm deal"), use_feature_values=True)
        lonely_score = {t.text: t.score for t in lonely.tokens}["palm"]
        crowded_score = {t.text: t.score for t in crowded.tokens}["palm"]
        assert lonely_score > crowded_score > 0


class TestRenderHtml:
    def test_empty_document(self, tmp_path):
        path = tmp_path / "empty.html"
        render_html(HighlightedDocument(()), path)
        text = path.read_text()
        assert text.startswith("<!DOCTYPE html>")
        assert "<p></p>" in text

    def test_pure_red_channel_scaling(self, tmp_path):
        model = build_model({"jumeirah": -9000.0})
        doc = highlight(model, record("jumeirah"))
        path = tmp_path / "red.html"
        render_html(doc, path)
        assert 'style="color:rgb(255,0,0)"' in path.read_text()

    def test_rounding_half_up(self, tmp_path):
        doc = HighlightedDocument.from_dict(
            {"tokens": [{"text": "x", "color": [0.0, 0.0, 0.5], "score": 1.0}]}
        )
        path = tmp_path / "half.html"
        render_html(doc, path)
        assert "rgb(0,0,128)" in path.read_text()

    def test_deterministic_bytes(self, tmp_path):
        model = build_model({"palm": 5.0, "deal": -3.0})
        doc = highlight(model, record("palm deal and more palm"))
        first, second = tmp_path / "a.html", tmp_path / "b.html"
        render_html(doc, first)
        render_html(doc, second)
        assert first.read_bytes() == second.read_bytes()

    def test_round_trip_through_dict(self):
        model = build_model({"palm": 5.0})
        doc = highlight(model, record("palm and more"))
        clone = HighlightedDocument.from_dict(doc.to_dict())
        assert clone == doc


class TestRenderKeywordTable:
    def test_two_column_layout(self):
        model = build_model({"palm": 8000.0, "study": 4000.0, "deal": -3000.0})
        table = keyword_table(model, 4).to_dict()
        text = render_keyword_table(table)
        lines = text.splitlines()
        assert "Positive term" in lines[1] and "Negative term" in lines[1]
        assert "palm" in lines[2] and "deal" in lines[2]
        assert "study" in lines[3]
