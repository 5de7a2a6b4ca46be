import math

import numpy as np
import pytest

from pricemine.errors import EmptyCorpusError, EmptyInputError
from pricemine.structured import FeatureMatrix
from pricemine.text import (
    TextConfig,
    correlation_filter,
    default_stopwords,
    fit_vocabulary,
    load_stopwords,
    ngrams,
    tfidf_encode,
    tokenize,
)

from oracles import tfidf_bruteforce

LN2 = 0.6931471805599453  # math.log(2)


@pytest.fixture(scope="module")
def config():
    return TextConfig()


class TestStopwords:
    def test_default_list_has_the_classics(self):
        words = default_stopwords()
        assert {"the", "is", "at", "with", "this", "from"} <= words
        assert 150 <= len(words) <= 200

    def test_load_custom_file(self, tmp_path):
        path = tmp_path / "stops.txt"
        path.write_text("# comment line\nfoo\nBAR  # trailing comment\n\nbaz\n")
        assert load_stopwords(path) == {"foo", "bar", "baz"}


class TestTokenize:
    def test_stopword_and_short_token_removal(self, config):
        assert tokenize("with full sea views", config) == ["full", "views"]

    def test_empty_string(self, config):
        assert tokenize("", config) == []

    def test_plain_split(self, config):
        assert tokenize("palm jumeirah", config) == ["palm", "jumeirah"]

    def test_splits_on_every_non_alphanumeric(self, config):
        assert tokenize("2br+maid, ready-to-move!", config) == ["maid", "ready", "move"]

    def test_underscore_is_a_separator(self, config):
        assert tokenize("palm_jumeirah", config) == ["palm", "jumeirah"]

    def test_digit_tokens_kept_when_long_enough(self, config):
        assert tokenize("call 0501234567 now 123", config) == ["call", "0501234567"]

    def test_idempotent_on_its_own_output(self, config):
        text = "stunning 2br+maid with full sea views in palm jumeirah 12345"
        once = tokenize(text, config)
        assert tokenize(" ".join(once), config) == once

    def test_custom_min_length(self):
        config = TextConfig(min_token_length=1, stopwords=frozenset())
        assert tokenize("a bb ccc", config) == ["a", "bb", "ccc"]


class TestNgrams:
    def test_unigrams_and_bigrams(self):
        assert ngrams(["palm", "jumeirah"], 2) == ["palm", "jumeirah", "palm_jumeirah"]

    def test_too_short_for_bigram(self):
        assert ngrams(["palm"], 2) == ["palm"]

    def test_unigram_identity(self):
        assert ngrams(["full", "views"], 1) == ["full", "views"]

    def test_trigrams_order(self):
        assert ngrams(["a1", "b2", "c3"], 3) == [
            "a1", "b2", "c3", "a1_b2", "b2_c3", "a1_b2_c3",
        ]

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            ngrams(["x"], 0)


class TestFitVocabulary:
    def test_rare_term_dropped(self):
        docs = [("", "common words here")] * 99 + [("", "common words here unique")]
        config = TextConfig(df_min_fraction=0.05, df_max_fraction=1.0, ngram_max=1)
        vocab = fit_vocabulary(docs, config)
        assert "unique" not in vocab.terms
        assert "common" in vocab.terms

    def test_term_in_all_docs_kept_at_df_max_one(self):
        docs = [("", "everywhere word%d" % i) for i in range(4)]
        config = TextConfig(df_min_fraction=0.0, df_max_fraction=1.0, ngram_max=1)
        vocab = fit_vocabulary(docs, config)
        index = vocab.index["everywhere"]
        assert vocab.doc_frequency[index] == 4
        assert vocab.idf[index] == 0.0

    def test_idf_is_natural_log(self):
        docs = [("", "alpha beta"), ("", "beta gamma")]
        config = TextConfig(df_min_fraction=0.0, df_max_fraction=1.0, ngram_max=1)
        vocab = fit_vocabulary(docs, config)
        assert vocab.idf[vocab.index["alpha"]] == pytest.approx(LN2, abs=1e-15)
        assert vocab.idf[vocab.index["beta"]] == 0.0

    def test_terms_sorted_lexicographically(self):
        docs = [("", "zulu yankee alpha"), ("", "zulu alpha")]
        config = TextConfig(df_min_fraction=0.0, df_max_fraction=1.0, ngram_max=2)
        vocab = fit_vocabulary(docs, config)
        assert list(vocab.terms) == sorted(vocab.terms)

    def test_title_and_description_joined(self):
        # The boundary bigram spans the title/description join.
        docs = [("palm jumeirah", "views included")] * 2
        config = TextConfig(df_min_fraction=0.0, df_max_fraction=1.0)
        vocab = fit_vocabulary(docs, config)
        assert "jumeirah_views" in vocab.terms

    def test_empty_corpus_raises(self, config):
        with pytest.raises(EmptyCorpusError):
            fit_vocabulary([], config)

    def test_document_frequency_counts_documents_not_occurrences(self):
        docs = [("", "echo echo echo"), ("", "other words")]
        config = TextConfig(df_min_fraction=0.0, df_max_fraction=1.0, ngram_max=1)
        vocab = fit_vocabulary(docs, config)
        assert vocab.doc_frequency[vocab.index["echo"]] == 1

    def test_vocabulary_size_monotone_in_df_bounds(self):
        rng = np.random.default_rng(5)
        pool = [f"word{i:02d}" for i in range(30)]
        docs = [
            ("", " ".join(rng.choice(pool, size=6, replace=False)))
            for _ in range(60)
        ]
        sizes_min = [
            len(fit_vocabulary(docs, TextConfig(df_min_fraction=lo, df_max_fraction=1.0)))
            for lo in (0.0, 0.02, 0.05, 0.1, 0.3)
        ]
        assert sizes_min == sorted(sizes_min, reverse=True)
        sizes_max = [
            len(fit_vocabulary(docs, TextConfig(df_min_fraction=0.0, df_max_fraction=hi)))
            for hi in (0.05, 0.1, 0.3, 0.6, 1.0)
        ]
        assert sizes_max == sorted(sizes_max)


class TestTfidfEncode:
    def test_single_term_single_occurrence(self):
        docs = [("", "alpha filler"), ("", "gamma filler")]
        config = TextConfig(df_min_fraction=0.0, df_max_fraction=0.5, ngram_max=1)
        vocab = fit_vocabulary(docs, config)  # filler is in both docs -> pruned
        assert set(vocab.terms) == {"alpha", "gamma"}
        matrix = tfidf_encode([("", "alpha")], vocab, config)
        assert matrix.values[0, vocab.index["alpha"]] == pytest.approx(LN2, abs=1e-15)
        assert matrix.values[0, vocab.index["gamma"]] == 0.0

    def test_document_without_vocabulary_terms_is_zero(self, config):
        docs = [("", "alpha beta"), ("", "alpha gamma")]
        cfg = TextConfig(df_min_fraction=0.0, df_max_fraction=0.6, ngram_max=1)
        vocab = fit_vocabulary(docs, cfg)
        matrix = tfidf_encode([("", "totally different words")], vocab, cfg)
        np.testing.assert_array_equal(matrix.values, np.zeros((1, len(vocab))))

    def test_idf_zero_term_contributes_zero(self):
        docs = [("", "everywhere alpha"), ("", "everywhere gamma")]
        cfg = TextConfig(df_min_fraction=0.0, df_max_fraction=1.0, ngram_max=1)
        vocab = fit_vocabulary(docs, cfg)
        matrix = tfidf_encode(docs, vocab, cfg)
        column = matrix.values[:, vocab.index["everywhere"]]
        np.testing.assert_array_equal(column, np.zeros(2))

    def test_l2_norm_hand_computed(self):
        # Document has alpha twice and gamma once: F = (2, 1), |F| = sqrt(5).
        docs = [("", "alpha alpha gamma"), ("", "beta other")]
        cfg = TextConfig(df_min_fraction=0.0, df_max_fraction=0.5, ngram_max=1)
        vocab = fit_vocabulary(docs, cfg)
        matrix = tfidf_encode([("", "alpha alpha gamma")], vocab, cfg)
        norm = math.sqrt(5.0)
        assert matrix.values[0, vocab.index["alpha"]] == pytest.approx(2 / norm * LN2, rel=1e-15)
        assert matrix.values[0, vocab.index["gamma"]] == pytest.approx(1 / norm * LN2, rel=1e-15)

    def test_token_count_norm(self):
        docs = [("", "alpha alpha gamma"), ("", "beta other")]
        cfg = TextConfig(df_min_fraction=0.0, df_max_fraction=0.5, ngram_max=1, tf_norm="token_count")
        vocab = fit_vocabulary(docs, cfg)
        matrix = tfidf_encode([("", "alpha alpha gamma")], vocab, cfg)
        assert matrix.values[0, vocab.index["alpha"]] == pytest.approx(2 / 3 * LN2, rel=1e-15)

    def test_entries_bounded_and_tf_norm_at_most_one(self):
        rng = np.random.default_rng(11)
        pool = [f"word{i:02d}" for i in range(25)]
        docs = [
            ("", " ".join(rng.choice(pool, size=rng.integers(2, 8), replace=False)))
            for _ in range(40)
        ]
        cfg = TextConfig(df_min_fraction=0.0, df_max_fraction=0.9)
        vocab = fit_vocabulary(docs, cfg)
        matrix = tfidf_encode(docs, vocab, cfg)
        assert matrix.values.min() >= 0.0
        assert matrix.values.max() <= vocab.idf.max() + 1e-12
        positive_idf = vocab.idf > 0
        tf_part = np.divide(
            matrix.values[:, positive_idf],
            vocab.idf[positive_idf],
            out=np.zeros((len(docs), int(positive_idf.sum()))),
            where=vocab.idf[positive_idf] > 0,
        )
        norms = np.linalg.norm(tf_part, axis=1)
        assert np.all(norms <= 1.0 + 1e-12)

    def test_column_all_zero_iff_idf_zero(self):
        rng = np.random.default_rng(13)
        pool = [f"word{i:02d}" for i in range(12)]
        docs = [
            ("", "always " + " ".join(rng.choice(pool, size=4, replace=False)))
            for _ in range(30)
        ]
        cfg = TextConfig(df_min_fraction=0.0, df_max_fraction=1.0, ngram_max=1)
        vocab = fit_vocabulary(docs, cfg)
        matrix = tfidf_encode(docs, vocab, cfg)
        for i in range(len(vocab)):
            all_zero = bool(np.all(matrix.values[:, i] == 0.0))
            assert all_zero == (vocab.idf[i] == 0.0)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(17)
        pool = [f"term{i:02d}" for i in range(15)]
        docs = [
            (
                " ".join(rng.choice(pool, size=2)),
                " ".join(rng.choice(pool, size=rng.integers(1, 6))),
            )
            for _ in range(25)
        ]
        cfg = TextConfig(df_min_fraction=0.02, df_max_fraction=0.9)
        vocab = fit_vocabulary(docs, cfg)
        matrix = tfidf_encode(docs, vocab, cfg)
        oracle_terms, oracle_rows = tfidf_bruteforce(
            docs, cfg.min_token_length, cfg.stopwords, cfg.ngram_max, 0.02, 0.9
        )
        assert list(vocab.terms) == oracle_terms
        for row, expected in enumerate(oracle_rows):
            for column, term in enumerate(vocab.terms):
                assert matrix.values[row, column] == pytest.approx(
                    expected.get(term, 0.0), rel=1e-12, abs=1e-15
                )


class TestCorrelationFilter:
    def matrix(self, columns: dict[str, list[float]]) -> FeatureMatrix:
        names = tuple(columns)
        return FeatureMatrix(names, np.array(list(zip(*columns.values())), dtype=float))

    def test_identical_columns_second_removed(self):
        m = self.matrix({"a": [1, 2, 3], "b": [1, 2, 3]})
        kept, removed = correlation_filter(m, 0.99)
        assert kept.column_names == ("a",)
        assert removed == ["b"]

    def test_uncorrelated_columns_kept(self):
        m = self.matrix({"a": [1, 2, 3, 4], "b": [1, -3, 4, -1]})
        kept, removed = correlation_filter(m, 0.99)
        assert kept.column_names == ("a", "b") and removed == []

    def test_three_identical_only_first_survives(self):
        m = self.matrix({"a": [1, 2, 3], "b": [2, 4, 6], "c": [3, 6, 9]})
        kept, removed = correlation_filter(m, 0.99)
        assert kept.column_names == ("a",)
        assert removed == ["b", "c"]

    def test_constant_columns_removed_first(self):
        m = self.matrix({"const": [5, 5, 5], "a": [1, 2, 3]})
        kept, removed = correlation_filter(m, 0.99)
        assert kept.column_names == ("a",)
        assert removed == ["const"]

    def test_negative_correlation_counts(self):
        m = self.matrix({"a": [1, 2, 3], "b": [-1, -2, -3]})
        kept, removed = correlation_filter(m, 0.99)
        assert kept.column_names == ("a",) and removed == ["b"]

    def test_removed_only_when_earlier_column_still_kept(self):
        # b is removed by a; c correlates only with b, so c stays.
        a = [1.0, 2.0, 3.0, 4.0]
        b = [2.0, 4.0, 6.0, 8.0]
        c = [10.0, -5.0, 3.0, 1.0]
        m = self.matrix({"a": a, "b": b, "c": c})
        kept, removed = correlation_filter(m, 0.99)
        assert kept.column_names == ("a", "c")
        assert removed == ["b"]

    def test_idempotent_and_first_variable_column_kept(self):
        rng = np.random.default_rng(23)
        base = rng.normal(size=(40, 3))
        values = np.column_stack([base, base[:, 0] * 1.0000001, np.full(40, 2.0)])
        m = FeatureMatrix(("a", "b", "c", "a_copy", "const"), values)
        kept, removed = correlation_filter(m, 0.99)
        again, removed_again = correlation_filter(kept, 0.99)
        assert again.column_names == kept.column_names
        assert removed_again == []
        assert "a" in kept.column_names

    def test_zero_rows_raises(self):
        with pytest.raises(EmptyInputError):
            correlation_filter(FeatureMatrix(("a",), np.zeros((0, 1))), 0.99)

    def test_single_row_all_constant(self):
        m = FeatureMatrix(("a", "b"), np.array([[1.0, 2.0]]))
        kept, removed = correlation_filter(m, 0.99)
        assert kept.n_columns == 0 and removed == ["a", "b"]

    def test_no_columns(self):
        m = FeatureMatrix((), np.zeros((3, 0)))
        kept, removed = correlation_filter(m, 0.99)
        assert kept.n_columns == 0 and removed == []


class TestTextConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"df_min_fraction": 0.6, "df_max_fraction": 0.5},
            {"df_min_fraction": -0.1},
            {"df_max_fraction": 0.0},
            {"ngram_max": 0},
            {"min_token_length": 0},
            {"correlation_threshold": 0.0},
            {"correlation_threshold": 1.5},
            {"tf_norm": "l1"},
        ],
    )
    def test_invalid_configs(self, kwargs):
        with pytest.raises(ValueError):
            TextConfig(**kwargs)
