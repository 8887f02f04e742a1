import json
import random

import numpy as np
import pytest

from simpletags.extract import ComplexTag, ExtractionRecord
from simpletags.topics import (
    GibbsLda,
    TopicModel,
    Vocabulary,
    build_keyword_documents,
    fit_topic_model,
    perplexity,
    validate_counts,
)


def record(doc_id, phrases):
    return ExtractionRecord(doc_id, tags=[ComplexTag(p, 0.9) for p in phrases])


def planted_records(n_docs=60, doc_len=40, vocab_per_topic=12, seed=7):
    """Two disjoint vocabularies; first half of the docs draws from one,
    second half from the other."""
    rng = random.Random(seed)
    vocab_a = [f"aster{i:02d}" for i in range(vocab_per_topic)]
    vocab_b = [f"bered{i:02d}" for i in range(vocab_per_topic)]
    records = []
    for d in range(n_docs):
        pool = vocab_a if d < n_docs // 2 else vocab_b
        words = [rng.choice(pool) for _ in range(doc_len)]
        records.append(record(f"doc{d:03d}", [" ".join(words)]))
    return records, set(vocab_a), set(vocab_b)


class TestVocabulary:
    def test_from_tokens_sorts_and_dedupes(self):
        vocab = Vocabulary.from_tokens(["beta", "alpha", "beta"])
        assert vocab.words == ("alpha", "beta")
        assert vocab.index("beta") == 1
        assert vocab.word(0) == "alpha"
        assert "alpha" in vocab and "gamma" not in vocab
        assert len(vocab) == 2

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            Vocabulary(("a", "a"))


class TestBuildKeywordDocuments:
    def test_phrases_split_into_unigram_bags(self):
        kd = build_keyword_documents(
            [record("d1", ["quantum computing", "quantum computers"])]
        )
        assert kd.doc_ids == ["d1"]
        words = [kd.vocabulary.word(i) for i in kd.tokens]
        assert words == ["quantum", "computing", "quantum", "computers"]
        assert kd.doc_lengths.tolist() == [4]
        assert kd.excluded == []

    def test_empty_bags_excluded(self):
        records = [
            record("keeps", ["alpha beta"]),
            record("no-tags", []),
            ExtractionRecord("failed", error="went wrong"),
            record("digits-only", ["42 17"]),
        ]
        kd = build_keyword_documents(records)
        assert kd.doc_ids == ["keeps"]
        assert kd.excluded == ["no-tags", "failed", "digits-only"]

    def test_doc_index_aligns(self):
        kd = build_keyword_documents(
            [record("d1", ["alpha beta"]), record("d2", ["gamma"])]
        )
        assert kd.doc_index.tolist() == [0, 0, 1]
        assert kd.n_docs == 2 and kd.n_tokens == 3


class TestGibbsLdaValidation:
    def test_seed_required(self):
        kd = build_keyword_documents([record("d", ["alpha beta"])])
        with pytest.raises(ValueError, match="seed"):
            GibbsLda(n_topics=2).fit(kd)

    @pytest.mark.parametrize("kwargs,match", [
        ({"n_topics": 0}, "n_topics"),
        ({"alpha": -1.0}, "alpha"),
        ({"beta": 0.0}, "beta"),
        ({"sweeps": 10, "burn_in": 10}, "sweeps"),
        ({"burn_in": -1}, "sweeps"),
        ({"thinning": 0}, "thinning"),
    ])
    def test_rejects_bad_parameters(self, kwargs, match):
        kd = build_keyword_documents([record("d", ["alpha beta"])])
        with pytest.raises(ValueError, match=match):
            GibbsLda(seed=1, **kwargs).fit(kd)

    def test_empty_corpus_rejected(self):
        kd = build_keyword_documents([record("d", [])])
        with pytest.raises(ValueError, match="empty"):
            GibbsLda(n_topics=2, seed=1).fit(kd)


class TestGibbsLdaSampling:
    def small_kd(self):
        records, _, _ = planted_records(n_docs=10, doc_len=20, vocab_per_topic=6)
        return build_keyword_documents(records)

    def test_count_identities_every_sweep(self):
        kd = self.small_kd()
        violations = []

        def check(lda, sweep):
            try:
                validate_counts(kd, lda.z_, lda.n_dk_, lda.n_kw_, lda.n_k_)
            except ValueError as exc:
                violations.append((sweep, str(exc)))

        GibbsLda(n_topics=3, sweeps=50, burn_in=20, seed=3).fit(kd, on_sweep=check)
        assert violations == []

    def test_validate_counts_detects_corruption(self):
        kd = self.small_kd()
        lda = GibbsLda(n_topics=3, sweeps=10, burn_in=5, seed=3).fit(kd)
        broken = lda.n_dk_.copy()
        broken[0, 0] += 1
        with pytest.raises(ValueError):
            validate_counts(kd, lda.z_, broken, lda.n_kw_, lda.n_k_)

    def test_same_seed_reproduces_exactly(self):
        kd = self.small_kd()
        a = GibbsLda(n_topics=3, sweeps=40, burn_in=20, seed=11).fit(kd)
        b = GibbsLda(n_topics=3, sweeps=40, burn_in=20, seed=11).fit(kd)
        assert np.array_equal(a.topic_word_, b.topic_word_)
        assert np.array_equal(a.doc_topic_, b.doc_topic_)
        assert np.array_equal(a.z_, b.z_)

    def test_different_seed_differs(self):
        kd = self.small_kd()
        a = GibbsLda(n_topics=3, sweeps=40, burn_in=20, seed=11).fit(kd)
        b = GibbsLda(n_topics=3, sweeps=40, burn_in=20, seed=12).fit(kd)
        assert not np.array_equal(a.topic_word_, b.topic_word_)

    def test_rows_normalized(self):
        kd = self.small_kd()
        lda = GibbsLda(n_topics=4, sweeps=60, burn_in=30, seed=5).fit(kd)
        np.testing.assert_allclose(lda.topic_word_.sum(axis=1), 1.0, atol=1e-9, rtol=0)
        np.testing.assert_allclose(lda.doc_topic_.sum(axis=1), 1.0, atol=1e-9, rtol=0)

    def test_sample_schedule(self):
        kd = self.small_kd()
        # First post-burn-in sweep is always sampled, then every 10th.
        lda = GibbsLda(n_topics=2, sweeps=805, burn_in=800, thinning=10, seed=1).fit(kd)
        assert lda.n_samples_ == 1
        lda = GibbsLda(n_topics=2, sweeps=1000, burn_in=800, thinning=10, seed=1).fit(kd)
        assert lda.n_samples_ == 20

    def test_single_topic_closed_form(self):
        kd = self.small_kd()
        beta = 0.01
        lda = GibbsLda(n_topics=1, beta=beta, sweeps=30, burn_in=10, seed=2).fit(kd)
        counts = np.bincount(kd.tokens, minlength=len(kd.vocabulary)).astype(np.int64)
        expected = (counts + beta) / (kd.n_tokens + len(kd.vocabulary) * beta)
        assert np.array_equal(lda.topic_word_[0], expected)
        assert np.all(lda.doc_topic_ == 1.0)

    def test_recovers_planted_partition(self):
        records, vocab_a, vocab_b = planted_records()
        model = fit_topic_model(
            records, n_topics=2, sweeps=150, burn_in=100, seed=13
        )
        tops = [
            {word for word, _ in model.top_words(topic, 8)} for topic in range(2)
        ]
        purities = []
        sides = []
        for top in tops:
            in_a = len(top & vocab_a)
            in_b = len(top & vocab_b)
            purities.append(max(in_a, in_b) / len(top))
            sides.append("a" if in_a > in_b else "b")
        assert all(p >= 0.9 for p in purities)
        assert sides[0] != sides[1]

    def test_transform_requires_fit(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            GibbsLda(n_topics=2, seed=1).transform()


class TestTopicModel:
    def fitted(self):
        records, _, _ = planted_records(n_docs=12, doc_len=15, vocab_per_topic=5)
        records.append(ExtractionRecord("empty-doc"))
        return fit_topic_model(records, n_topics=2, sweeps=30, burn_in=10, seed=4)

    def test_save_load_roundtrip_exact(self, tmp_path):
        model = self.fitted()
        path = tmp_path / "model.json"
        model.save(path)
        loaded = TopicModel.load(path)
        assert loaded.vocabulary.words == model.vocabulary.words
        assert np.array_equal(loaded.topic_word, model.topic_word)
        assert np.array_equal(loaded.doc_topic, model.doc_topic)
        assert loaded.doc_ids == model.doc_ids
        assert loaded.excluded == model.excluded
        assert loaded.config == model.config

    def test_model_file_shape(self, tmp_path):
        model = self.fitted()
        path = tmp_path / "model.json"
        model.save(path)
        obj = json.loads(path.read_text(encoding="utf-8"))
        assert set(obj) == {"config", "vocabulary", "topic_word", "doc_topic", "excluded"}
        assert obj["config"]["rng"] == "numpy PCG64"
        assert obj["config"]["seed"] == 4
        assert obj["excluded"] == ["empty-doc"]
        assert list(obj["doc_topic"]) == model.doc_ids

    def test_top_words_ties_break_lexicographically(self):
        model = TopicModel(
            vocabulary=Vocabulary(("apple", "pear", "plum")),
            topic_word=np.array([[0.4, 0.2, 0.4]]),
            doc_ids=["d"],
            doc_topic=np.array([[1.0]]),
            excluded=[],
            config={},
        )
        assert model.top_words(0, 2) == [("apple", 0.4), ("plum", 0.4)]

    def test_excluded_documents_listed(self):
        model = self.fitted()
        assert model.excluded == ["empty-doc"]
        assert "empty-doc" not in model.doc_ids

    def test_perplexity_in_sane_range(self):
        records, _, _ = planted_records(n_docs=12, doc_len=15, vocab_per_topic=5)
        kd = build_keyword_documents(records)
        lda = GibbsLda(n_topics=2, sweeps=30, burn_in=10, seed=4).fit(kd)
        value = perplexity(kd, lda.topic_word_, lda.doc_topic_)
        assert 1.0 <= value < len(kd.vocabulary)
