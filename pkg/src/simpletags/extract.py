"""Per-document keyword extraction producing confidence-scored complex tags.

Three interchangeable extractors share one output contract: a list of
:class:`ComplexTag` whose confidences lie in (threshold, 1], sorted by
descending confidence with lexicographic tie-breaks.

* :class:`TfidfKeywordExtractor` scores candidate phrases by summed
  term weights tf * ln(N / df) over a fitted corpus.
* :class:`CooccurrenceGraphExtractor` ranks tokens in a per-document
  co-occurrence graph with a damped iterative rank.
* :class:`RemoteKeywordExtractor` calls a keyword-extraction HTTP service
  and maps its relevance scores to confidences unchanged.
"""

from __future__ import annotations

import json
import logging
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import requests
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .corpus import Document, StopwordList, is_word, segment, tokenize

__all__ = [
    "ComplexTag",
    "CooccurrenceGraphExtractor",
    "ExtractionError",
    "ExtractionRecord",
    "ExtractorConfig",
    "RemoteKeywordExtractor",
    "TermStats",
    "TermStatsError",
    "TfidfKeywordExtractor",
    "build_extractor",
    "extract_corpus",
    "phrase_candidates",
    "read_tag_cache",
    "tfidf_weight",
    "token_ranks",
    "write_tag_cache",
]

logger = logging.getLogger(__name__)

EXTRACTOR_KINDS = ("tfidf", "graph", "remote")


class ExtractionError(Exception):
    """Extraction failed for one document; the corpus run continues."""


class TermStatsError(RuntimeError):
    """Internal inconsistency between term and document frequencies."""


@dataclass(frozen=True)
class ComplexTag:
    """An extracted keyword/phrase with a confidence score in [0, 1]."""

    phrase: str
    confidence: float

    def __post_init__(self) -> None:
        if not self.phrase:
            raise ValueError("tag phrase must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class ExtractorConfig:
    """Configuration shared by the extractor kinds.

    ``kind`` selects the extractor; ``endpoint`` (plus the optional
    ``api_token``) applies to the remote kind only. Tags survive only with
    confidence strictly greater than ``confidence_threshold``.
    """

    kind: str = "tfidf"
    confidence_threshold: float = 0.5
    max_phrase_len: int = 4
    max_tags_per_doc: int = 50
    endpoint: str | None = None
    api_token: str | None = None
    concurrency: int = 8
    timeout: float = 30.0
    max_attempts: int = 3
    backoff: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in EXTRACTOR_KINDS:
            raise ValueError(f"unknown extractor kind {self.kind!r}")
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ValueError("confidence_threshold must lie in [0, 1]")
        if self.max_phrase_len < 1:
            raise ValueError("max_phrase_len must be >= 1")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote extractor requires an endpoint")


@dataclass
class TermStats:
    """Corpus term statistics: per-document term counts, document frequency,
    and corpus size, as used by the tf*idf weighting."""

    tf: dict[str, Counter]
    df: Counter
    n_docs: int

    @classmethod
    def from_documents(
        cls, documents: Sequence[Document], stopwords: StopwordList
    ) -> "TermStats":
        tf: dict[str, Counter] = {}
        df: Counter = Counter()
        for doc in documents:
            counts = Counter(tokenize(doc.text, stopwords))
            tf[doc.id] = counts
            df.update(counts.keys())
        return cls(tf=tf, df=df, n_docs=len(documents))

    def term_frequency(self, term: str, doc_id: str) -> int:
        try:
            return self.tf[doc_id][term]
        except KeyError:
            raise KeyError(f"document {doc_id!r} is not part of the fitted corpus") from None

    def document_frequency(self, term: str) -> int:
        return self.df[term]


def tfidf_weight(stats: TermStats, term: str, doc_id: str) -> float:
    """Weight of ``term`` in ``doc_id``: tf * ln(N / df), natural logarithm.

    Zero term frequency yields 0.0 regardless of df; a positive frequency
    with zero document frequency raises :class:`TermStatsError`.
    """
    tf = stats.term_frequency(term, doc_id)
    if tf == 0:
        return 0.0
    df = stats.document_frequency(term)
    if df < 1:
        raise TermStatsError(
            f"term {term!r} has tf={tf} in {doc_id!r} but df=0: inconsistent stats"
        )
    return tf * math.log(stats.n_docs / df)


def phrase_candidates(
    text: str, stopwords: StopwordList, max_phrase_len: int
) -> list[tuple[str, ...]]:
    """Candidate phrases: maximal stopword-free token runs, split into
    consecutive chunks of at most ``max_phrase_len`` tokens.

    Stopwords and digit-only tokens both end a run, so candidates never span
    material that the tokenizer would drop.
    """
    candidates: list[tuple[str, ...]] = []
    run: list[str] = []

    def flush() -> None:
        for start in range(0, len(run), max_phrase_len):
            candidates.append(tuple(run[start : start + max_phrase_len]))
        run.clear()

    for token in segment(text):
        if is_word(token) and token not in stopwords:
            run.append(token)
        elif run:
            flush()
    if run:
        flush()
    return candidates


def _finalize(
    scores: Mapping[str, float],
    confidence_threshold: float,
    max_tags_per_doc: int,
) -> list[ComplexTag]:
    """Max-normalize phrase scores to confidences, filter strictly above the
    threshold, sort by descending confidence then phrase, and cap."""
    if not scores:
        return []
    top = max(scores.values())
    if top <= 0.0:
        return []
    tags = [
        ComplexTag(phrase, score / top)
        for phrase, score in scores.items()
        if score / top > confidence_threshold
    ]
    tags.sort(key=lambda t: (-t.confidence, t.phrase))
    return tags[:max_tags_per_doc]


class TfidfKeywordExtractor(BaseEstimator):
    """Keyword extractor scoring phrases by summed tf * ln(N / df) weights.

    Parameters
    ----------
    confidence_threshold : float, default=0.5
        Tags survive only with confidence strictly greater than this.
    max_phrase_len : int, default=4
        Candidate phrases are at most this many tokens.
    max_tags_per_doc : int, default=50
        Cap on tags returned per document.
    stopwords : StopwordList, optional
        Defaults to the bundled English list.

    Attributes
    ----------
    term_stats_ : TermStats
        Corpus statistics built during :meth:`fit`.
    """

    def __init__(
        self,
        confidence_threshold: float = 0.5,
        max_phrase_len: int = 4,
        max_tags_per_doc: int = 50,
        stopwords: StopwordList | None = None,
    ):
        self.confidence_threshold = confidence_threshold
        self.max_phrase_len = max_phrase_len
        self.max_tags_per_doc = max_tags_per_doc
        self.stopwords = stopwords

    def _stopwords(self) -> StopwordList:
        return self.stopwords if self.stopwords is not None else StopwordList.default()

    def fit(self, documents: Sequence[Document], y=None) -> "TfidfKeywordExtractor":
        """Build corpus term statistics over ``documents``."""
        self.term_stats_ = TermStats.from_documents(documents, self._stopwords())
        return self

    def extract(self, document: Document) -> list[ComplexTag]:
        """Complex tags for one document of the fitted corpus."""
        if not hasattr(self, "term_stats_"):
            raise NotFittedError("TfidfKeywordExtractor must be fitted before extract()")
        stats = self.term_stats_
        scores: dict[str, float] = {}
        for tokens in phrase_candidates(document.text, self._stopwords(), self.max_phrase_len):
            phrase = " ".join(tokens)
            if phrase not in scores:
                scores[phrase] = sum(tfidf_weight(stats, t, document.id) for t in tokens)
        return _finalize(scores, self.confidence_threshold, self.max_tags_per_doc)

    def transform(self, documents: Sequence[Document]) -> list[list[ComplexTag]]:
        return [self.extract(doc) for doc in documents]


def token_ranks(
    tokens: Sequence[str],
    window: int = 4,
    damping: float = 0.85,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> dict[str, float]:
    """Damped iterative rank of distinct tokens in a co-occurrence graph.

    Two tokens co-occur when they fall within the same sliding window of
    ``window`` consecutive stream positions; each such pair adds 1 to the
    edge weight. Scores iterate synchronously via

        rank(v) = (1 - damping) + damping * sum_u w(u, v) / strength(u) * rank(u)

    until the largest score change drops below ``tol`` or ``max_iter``
    sweeps have run. Isolated nodes keep the baseline 1 - damping.
    """
    nodes = sorted(set(tokens))
    if not nodes:
        return {}
    weights: dict[str, Counter] = {node: Counter() for node in nodes}
    for i, a in enumerate(tokens):
        for j in range(i + 1, min(i + window, len(tokens))):
            b = tokens[j]
            if a != b:
                weights[a][b] += 1
                weights[b][a] += 1
    strength = {node: sum(weights[node].values()) for node in nodes}
    ranks = {node: 1.0 for node in nodes}
    for _ in range(max_iter):
        new_ranks = {}
        for node in nodes:
            pull = sum(
                w / strength[other] * ranks[other] for other, w in weights[node].items()
            )
            new_ranks[node] = (1.0 - damping) + damping * pull
        delta = max(abs(new_ranks[n] - ranks[n]) for n in nodes)
        ranks = new_ranks
        if delta < tol:
            break
    return ranks


class CooccurrenceGraphExtractor(BaseEstimator):
    """Keyword extractor ranking tokens in a per-document co-occurrence graph.

    Stateless across documents: :meth:`fit` exists for pipeline uniformity.
    Phrase candidates are scored by the summed ranks of their member tokens
    (see :func:`token_ranks`) and max-normalized per document.
    """

    def __init__(
        self,
        confidence_threshold: float = 0.5,
        max_phrase_len: int = 4,
        max_tags_per_doc: int = 50,
        window: int = 4,
        damping: float = 0.85,
        tol: float = 1e-6,
        max_iter: int = 100,
        stopwords: StopwordList | None = None,
    ):
        self.confidence_threshold = confidence_threshold
        self.max_phrase_len = max_phrase_len
        self.max_tags_per_doc = max_tags_per_doc
        self.window = window
        self.damping = damping
        self.tol = tol
        self.max_iter = max_iter
        self.stopwords = stopwords

    def _stopwords(self) -> StopwordList:
        return self.stopwords if self.stopwords is not None else StopwordList.default()

    def fit(self, documents: Sequence[Document] | None = None, y=None):
        return self

    def extract(self, document: Document) -> list[ComplexTag]:
        stopwords = self._stopwords()
        stream = tokenize(document.text, stopwords)
        ranks = token_ranks(
            stream,
            window=self.window,
            damping=self.damping,
            tol=self.tol,
            max_iter=self.max_iter,
        )
        scores: dict[str, float] = {}
        for tokens in phrase_candidates(document.text, stopwords, self.max_phrase_len):
            phrase = " ".join(tokens)
            if phrase not in scores:
                scores[phrase] = sum(ranks[t] for t in tokens)
        return _finalize(scores, self.confidence_threshold, self.max_tags_per_doc)

    def transform(self, documents: Sequence[Document]) -> list[list[ComplexTag]]:
        return [self.extract(doc) for doc in documents]


class RemoteKeywordExtractor(BaseEstimator):
    """Client for a keyword-extraction HTTP service.

    Sends the document text and maps the returned relevance scores to
    confidences unchanged, then applies the same threshold/cap rules as the
    local extractors. Transient failures (connection errors, timeouts,
    5xx responses) are retried ``max_attempts`` times with exponential
    backoff; anything else fails the document immediately.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        confidence_threshold: float = 0.5,
        max_tags_per_doc: int = 50,
        api_token: str | None = None,
        timeout: float = 30.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
    ):
        self.endpoint = endpoint
        self.confidence_threshold = confidence_threshold
        self.max_tags_per_doc = max_tags_per_doc
        self.api_token = api_token
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff

    def fit(self, documents: Sequence[Document] | None = None, y=None):
        if not self.endpoint:
            raise ValueError("remote extractor requires an endpoint")
        return self

    def _request(self, text: str) -> requests.Response:
        headers = {"Content-Type": "application/json"}
        if self.api_token:
            headers["Authorization"] = f"Bearer {self.api_token}"
        payload = {"text": text, "features": {"keywords": {"limit": self.max_tags_per_doc}}}
        return requests.post(
            self.endpoint, json=payload, headers=headers, timeout=self.timeout
        )

    def _post_with_retries(self, document: Document) -> requests.Response:
        last_error = "no attempts made"
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self._request(document.text)
            except requests.RequestException as exc:
                last_error = f"request failed: {exc}"
            else:
                if response.status_code == 200:
                    return response
                last_error = f"service returned HTTP {response.status_code}"
                if response.status_code < 500:
                    break
            if attempt < self.max_attempts:
                time.sleep(self.backoff * 2 ** (attempt - 1))
        raise ExtractionError(
            f"remote extraction failed for {document.id!r} after {attempt} attempt(s): {last_error}"
        )

    def _parse(self, response: requests.Response, document: Document) -> list[ComplexTag]:
        try:
            body = response.json()
        except ValueError as exc:
            raise ExtractionError(f"malformed response for {document.id!r}: not JSON") from exc
        keywords = body.get("keywords") if isinstance(body, dict) else None
        if not isinstance(keywords, list):
            raise ExtractionError(
                f"malformed response for {document.id!r}: missing 'keywords' list"
            )
        scores: dict[str, float] = {}
        for entry in keywords:
            if not isinstance(entry, dict):
                raise ExtractionError(f"malformed keyword entry for {document.id!r}")
            text = entry.get("text")
            relevance = entry.get("relevance")
            if (
                not isinstance(text, str)
                or not text
                or not isinstance(relevance, (int, float))
                or isinstance(relevance, bool)
                or not 0.0 <= relevance <= 1.0
            ):
                raise ExtractionError(f"malformed keyword entry for {document.id!r}")
            scores[text] = max(scores.get(text, 0.0), float(relevance))
        tags = [
            ComplexTag(phrase, confidence)
            for phrase, confidence in scores.items()
            if confidence > self.confidence_threshold
        ]
        tags.sort(key=lambda t: (-t.confidence, t.phrase))
        return tags[: self.max_tags_per_doc]

    def extract(self, document: Document) -> list[ComplexTag]:
        if not self.endpoint:
            raise ValueError("remote extractor requires an endpoint")
        if not document.text.strip():
            return []
        response = self._post_with_retries(document)
        return self._parse(response, document)

    def transform(self, documents: Sequence[Document]) -> list[list[ComplexTag]]:
        return [self.extract(doc) for doc in documents]


def build_extractor(config: ExtractorConfig, stopwords: StopwordList | None = None):
    """Instantiate the extractor selected by ``config.kind`` (unfitted)."""
    if config.kind == "tfidf":
        return TfidfKeywordExtractor(
            confidence_threshold=config.confidence_threshold,
            max_phrase_len=config.max_phrase_len,
            max_tags_per_doc=config.max_tags_per_doc,
            stopwords=stopwords,
        )
    if config.kind == "graph":
        return CooccurrenceGraphExtractor(
            confidence_threshold=config.confidence_threshold,
            max_phrase_len=config.max_phrase_len,
            max_tags_per_doc=config.max_tags_per_doc,
            stopwords=stopwords,
        )
    return RemoteKeywordExtractor(
        endpoint=config.endpoint,
        confidence_threshold=config.confidence_threshold,
        max_tags_per_doc=config.max_tags_per_doc,
        api_token=config.api_token,
        timeout=config.timeout,
        max_attempts=config.max_attempts,
        backoff=config.backoff,
    )


@dataclass
class ExtractionRecord:
    """Cache entry for one document: its tags, or the error that stopped them."""

    id: str
    tags: list[ComplexTag] = field(default_factory=list)
    error: str | None = None


def extract_corpus(
    documents: Sequence[Document],
    extractor,
    cache_path: str | Path | None = None,
    concurrency: int = 1,
) -> dict[str, ExtractionRecord]:
    """Run ``extractor`` over every document, isolating per-document failures.

    Results are keyed by document id in input order. Documents with no text
    in any field are flagged unprocessable without invoking the extractor.
    When ``cache_path`` is given the records are persisted in the complex-tag
    cache format. With ``concurrency`` > 1 documents are processed by a
    thread pool; output order stays deterministic either way.
    """

    def one(doc: Document) -> ExtractionRecord:
        if not doc.has_text:
            return ExtractionRecord(doc.id, error="unprocessable: document has no text")
        try:
            return ExtractionRecord(doc.id, tags=extractor.extract(doc))
        except ExtractionError as exc:
            logger.warning("extraction failed for %s: %s", doc.id, exc)
            return ExtractionRecord(doc.id, error=str(exc))

    if concurrency > 1 and len(documents) > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            records = list(pool.map(one, documents))
    else:
        records = [one(doc) for doc in documents]

    result = {record.id: record for record in records}
    if cache_path is not None:
        write_tag_cache(result.values(), cache_path)
    return result


def _record_to_json(record: ExtractionRecord) -> str:
    obj: dict = {
        "id": record.id,
        "tags": [{"phrase": t.phrase, "confidence": t.confidence} for t in record.tags],
    }
    if record.error is not None:
        obj["error"] = record.error
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_tag_cache(records: Iterable[ExtractionRecord], path: str | Path) -> None:
    """Write the JSON Lines complex-tag cache (one record per document)."""
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(_record_to_json(record) + "\n")


def read_tag_cache(path: str | Path) -> dict[str, ExtractionRecord]:
    """Read a complex-tag cache back into records, preserving file order."""
    records: dict[str, ExtractionRecord] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            try:
                obj = json.loads(line)
                tags = [
                    ComplexTag(entry["phrase"], entry["confidence"]) for entry in obj["tags"]
                ]
                record = ExtractionRecord(obj["id"], tags=tags, error=obj.get("error"))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"malformed cache line {line_no} in {path}: {exc}") from exc
            records[record.id] = record
    return records
