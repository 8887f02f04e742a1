"""Topic modeling over keyword bags with a collapsed Gibbs sampler.

Documents enter as their extracted complex tags; each document becomes the
bag of unigrams obtained by splitting those tags. Documents whose bag is
empty (no tags survived extraction, or extraction failed) are excluded from
the fit and listed on the resulting model.

Topic-word and document-topic distributions are posterior means over thinned
post-burn-in sweeps, updated with a running (Welford) mean so that averaging
identical samples reproduces them exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import chain
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._gibbs import run_sweep
from .corpus import is_word, segment
from .extract import ExtractionRecord

__all__ = [
    "GibbsLda",
    "KeywordDocs",
    "TopicModel",
    "Vocabulary",
    "build_keyword_documents",
    "fit_topic_model",
    "perplexity",
    "validate_counts",
]

RNG_NAME = "numpy PCG64"


@dataclass(frozen=True)
class Vocabulary:
    """Immutable sorted word list with id lookup in both directions."""

    words: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {word: i for i, word in enumerate(self.words)}
        if len(index) != len(self.words):
            raise ValueError("vocabulary contains duplicate words")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Vocabulary":
        return cls(tuple(sorted(set(tokens))))

    def index(self, word: str) -> int:
        return self._index[word]

    def word(self, i: int) -> str:
        return self.words[i]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __iter__(self):
        return iter(self.words)


@dataclass
class KeywordDocs:
    """Keyword bags in the flat token layout the sampler consumes.

    ``tokens[i]`` is the vocabulary id of the i-th token and ``doc_index[i]``
    the position of its document in ``doc_ids``. ``excluded`` lists documents
    dropped for having an empty bag.
    """

    doc_ids: list[str]
    vocabulary: Vocabulary
    tokens: np.ndarray
    doc_index: np.ndarray
    doc_lengths: np.ndarray
    excluded: list[str]

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def n_tokens(self) -> int:
        return int(self.tokens.shape[0])


def build_keyword_documents(records: Iterable[ExtractionRecord]) -> KeywordDocs:
    """Turn extraction records into keyword bags.

    Each document's bag is the concatenation of the unigrams of its tag
    phrases, in tag order, keeping repeats. Records with an empty bag
    (including failed extractions) are excluded.
    """
    doc_ids: list[str] = []
    bags: list[list[str]] = []
    excluded: list[str] = []
    for record in records:
        bag = [
            token
            for tag in record.tags
            for token in segment(tag.phrase)
            if is_word(token)
        ]
        if bag:
            doc_ids.append(record.id)
            bags.append(bag)
        else:
            excluded.append(record.id)

    vocabulary = Vocabulary.from_tokens(chain.from_iterable(bags))
    doc_lengths = np.array([len(bag) for bag in bags], dtype=np.int64)
    total = int(doc_lengths.sum()) if bags else 0
    tokens = np.fromiter(
        (vocabulary.index(t) for bag in bags for t in bag), dtype=np.int32, count=total
    )
    doc_index = np.repeat(np.arange(len(bags), dtype=np.int32), doc_lengths)
    return KeywordDocs(
        doc_ids=doc_ids,
        vocabulary=vocabulary,
        tokens=tokens,
        doc_index=doc_index.astype(np.int32),
        doc_lengths=doc_lengths,
        excluded=excluded,
    )


def validate_counts(
    keyword_docs: KeywordDocs,
    z: np.ndarray,
    n_dk: np.ndarray,
    n_kw: np.ndarray,
    n_k: np.ndarray,
) -> None:
    """Check the sampler count identities against the assignment vector.

    Raises ValueError if any count matrix disagrees with a recount of ``z``
    or if the marginal sums do not reproduce the token total.
    """
    n_docs, n_topics = n_dk.shape
    ref_dk = np.zeros((n_docs, n_topics), dtype=np.int64)
    np.add.at(ref_dk, (keyword_docs.doc_index, z), 1)
    ref_kw = np.zeros_like(n_kw)
    np.add.at(ref_kw, (z, keyword_docs.tokens), 1)
    ref_k = np.bincount(z, minlength=n_topics).astype(np.int64)
    if not np.array_equal(ref_dk, n_dk):
        raise ValueError("document-topic counts disagree with assignments")
    if not np.array_equal(ref_kw, n_kw):
        raise ValueError("topic-word counts disagree with assignments")
    if not np.array_equal(ref_k, n_k):
        raise ValueError("topic totals disagree with assignments")
    total = keyword_docs.n_tokens
    if int(n_k.sum()) != total or int(n_dk.sum()) != total or int(n_kw.sum()) != total:
        raise ValueError("count marginals do not sum to the token total")


class GibbsLda(BaseEstimator):
    """Latent Dirichlet allocation fitted by collapsed Gibbs sampling.

    Parameters
    ----------
    n_topics : int, default=30
        Number of topics K.
    alpha : float, optional
        Symmetric document-topic prior; defaults to 50 / K when None.
    beta : float, default=0.01
        Symmetric topic-word prior.
    sweeps : int, default=1000
        Total Gibbs sweeps; must exceed ``burn_in``.
    burn_in : int, default=800
        Sweeps discarded before sampling the posterior mean.
    thinning : int, default=10
        Interval between retained post-burn-in samples.
    seed : int
        Seed for the PCG64 generator; required, there is no default stream.

    Attributes
    ----------
    topic_word_ : ndarray of shape (n_topics, n_words)
        Posterior mean of the topic-word distributions; rows sum to 1.
    doc_topic_ : ndarray of shape (n_docs, n_topics)
        Posterior mean of the document-topic distributions; rows sum to 1.
    n_samples_ : int
        Number of retained samples in the means.
    z_, n_dk_, n_kw_, n_k_ : ndarray
        Final assignment vector and count matrices, mutually consistent.
    """

    def __init__(
        self,
        n_topics: int = 30,
        alpha: float | None = None,
        beta: float = 0.01,
        sweeps: int = 1000,
        burn_in: int = 800,
        thinning: int = 10,
        seed: int | None = None,
    ):
        self.n_topics = n_topics
        self.alpha = alpha
        self.beta = beta
        self.sweeps = sweeps
        self.burn_in = burn_in
        self.thinning = thinning
        self.seed = seed

    def _validate(self) -> None:
        if self.seed is None:
            raise ValueError("GibbsLda requires an explicit seed")
        if self.n_topics < 1:
            raise ValueError("n_topics must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.burn_in < 0 or self.sweeps <= self.burn_in:
            raise ValueError("need sweeps > burn_in >= 0")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")

    def fit(
        self,
        X: KeywordDocs,
        y=None,
        on_sweep: Callable[["GibbsLda", int], None] | None = None,
    ) -> "GibbsLda":
        """Run the sampler over ``X`` and accumulate posterior means.

        ``on_sweep(self, sweep)`` is invoked after every sweep (1-based)
        with the state attributes updated in place, for instrumentation.
        """
        self._validate()
        if X.n_tokens == 0:
            raise ValueError("cannot fit a topic model on an empty keyword corpus")
        n_topics = self.n_topics
        n_docs = X.n_docs
        n_words = len(X.vocabulary)
        alpha = 50.0 / n_topics if self.alpha is None else float(self.alpha)
        beta = float(self.beta)

        rng = np.random.Generator(np.random.PCG64(self.seed))
        z = rng.integers(0, n_topics, size=X.n_tokens, dtype=np.int32)
        n_dk = np.zeros((n_docs, n_topics), dtype=np.int64)
        np.add.at(n_dk, (X.doc_index, z), 1)
        n_kw = np.zeros((n_topics, n_words), dtype=np.int64)
        np.add.at(n_kw, (z, X.tokens), 1)
        n_k = np.bincount(z, minlength=n_topics).astype(np.int64)

        self.alpha_ = alpha
        self.z_ = z
        self.n_dk_ = n_dk
        self.n_kw_ = n_kw
        self.n_k_ = n_k

        phi_mean = np.zeros((n_topics, n_words), dtype=np.float64)
        theta_mean = np.zeros((n_docs, n_topics), dtype=np.float64)
        n_samples = 0

        for sweep in range(1, self.sweeps + 1):
            uniforms = rng.random(X.n_tokens)
            run_sweep(X.tokens, X.doc_index, z, n_dk, n_kw, n_k, alpha, beta, uniforms)
            if sweep > self.burn_in and (sweep - self.burn_in - 1) % self.thinning == 0:
                n_samples += 1
                phi = (n_kw + beta) / (n_k[:, None] + n_words * beta)
                theta = (n_dk + alpha) / (X.doc_lengths[:, None] + n_topics * alpha)
                phi_mean += (phi - phi_mean) / n_samples
                theta_mean += (theta - theta_mean) / n_samples
            if on_sweep is not None:
                on_sweep(self, sweep)

        self.topic_word_ = phi_mean
        self.doc_topic_ = theta_mean
        self.n_samples_ = n_samples
        self.doc_ids_ = list(X.doc_ids)
        self.vocabulary_ = X.vocabulary
        return self

    def transform(self, X: KeywordDocs | None = None) -> np.ndarray:
        """Document-topic means of the fitted corpus."""
        if not hasattr(self, "doc_topic_"):
            raise NotFittedError("GibbsLda must be fitted before transform()")
        return self.doc_topic_


@dataclass
class TopicModel:
    """Fitted topic model in a form that serializes to a single JSON file."""

    vocabulary: Vocabulary
    topic_word: np.ndarray
    doc_ids: list[str]
    doc_topic: np.ndarray
    excluded: list[str]
    config: dict

    @property
    def n_topics(self) -> int:
        return int(self.topic_word.shape[0])

    def top_words(self, topic: int, m: int) -> list[tuple[str, float]]:
        """The ``m`` highest-probability words of ``topic`` with their
        probabilities, ties broken lexicographically."""
        row = self.topic_word[topic]
        order = sorted(range(len(row)), key=lambda i: (-row[i], self.vocabulary.word(i)))
        return [(self.vocabulary.word(i), float(row[i])) for i in order[:m]]

    def save(self, path: str | Path) -> None:
        obj = {
            "config": self.config,
            "vocabulary": list(self.vocabulary.words),
            "topic_word": [list(map(float, row)) for row in self.topic_word],
            "doc_topic": {
                doc_id: list(map(float, row))
                for doc_id, row in zip(self.doc_ids, self.doc_topic)
            },
            "excluded": list(self.excluded),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(obj, f, ensure_ascii=False, separators=(",", ":"))
            f.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
        doc_ids = list(obj["doc_topic"].keys())
        return cls(
            vocabulary=Vocabulary(tuple(obj["vocabulary"])),
            topic_word=np.array(obj["topic_word"], dtype=np.float64),
            doc_ids=doc_ids,
            doc_topic=np.array(
                [obj["doc_topic"][d] for d in doc_ids], dtype=np.float64
            ).reshape(len(doc_ids), -1),
            excluded=list(obj["excluded"]),
            config=obj["config"],
        )


def fit_topic_model(
    records: Iterable[ExtractionRecord],
    n_topics: int = 30,
    alpha: float | None = None,
    beta: float = 0.01,
    sweeps: int = 1000,
    burn_in: int = 800,
    thinning: int = 10,
    seed: int | None = None,
    on_sweep: Callable[[GibbsLda, int], None] | None = None,
) -> TopicModel:
    """Build keyword bags from ``records``, fit :class:`GibbsLda`, and
    package the result as a :class:`TopicModel`."""
    keyword_docs = build_keyword_documents(records)
    lda = GibbsLda(
        n_topics=n_topics,
        alpha=alpha,
        beta=beta,
        sweeps=sweeps,
        burn_in=burn_in,
        thinning=thinning,
        seed=seed,
    )
    lda.fit(keyword_docs, on_sweep=on_sweep)
    config = {
        "n_topics": n_topics,
        "alpha": lda.alpha_,
        "beta": beta,
        "sweeps": sweeps,
        "burn_in": burn_in,
        "thinning": thinning,
        "seed": seed,
        "rng": RNG_NAME,
    }
    return TopicModel(
        vocabulary=keyword_docs.vocabulary,
        topic_word=lda.topic_word_,
        doc_ids=lda.doc_ids_,
        doc_topic=lda.doc_topic_,
        excluded=keyword_docs.excluded,
        config=config,
    )


def perplexity(
    keyword_docs: KeywordDocs, topic_word: np.ndarray, doc_topic: np.ndarray
) -> float:
    """Perplexity of the keyword corpus under mixture probabilities
    p(w | d) = sum_k theta[d, k] * phi[k, w]; lower is better."""
    probs = np.einsum(
        "ik,ik->i",
        doc_topic[keyword_docs.doc_index],
        topic_word[:, keyword_docs.tokens].T,
    )
    return float(np.exp(-np.log(probs).sum() / keyword_docs.n_tokens))
