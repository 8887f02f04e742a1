"""Document ingestion, text normalization, and stopword filtering.

The tokenization rules here are shared by every downstream stage: keyword
extraction, topic-model input construction, and tag application all match
on exactly these normalized unigrams (no stemming, no fuzzy matching).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

__all__ = [
    "CorpusFormatError",
    "Document",
    "StopwordList",
    "ingest_corpus",
    "is_word",
    "segment",
    "tokenize",
]

# A token is a maximal run of Unicode letters/digits with internal single
# hyphens preserved; everything else (whitespace, punctuation, underscores)
# separates tokens.
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)


class CorpusFormatError(ValueError):
    """A corpus file (or one of its lines) does not match the declared format."""


@dataclass(frozen=True)
class Document:
    """One unit of ingestion: an id plus title/summary/content text."""

    id: str
    title: str = ""
    summary: str = ""
    content: str = ""
    language_hint: str | None = None

    @property
    def text(self) -> str:
        """Title, summary, and content joined by single spaces."""
        return " ".join((self.title, self.summary, self.content))

    @property
    def has_text(self) -> bool:
        """False for documents with no text in any field (unprocessable)."""
        return bool(self.title or self.summary or self.content)


@dataclass(frozen=True)
class StopwordList:
    """Set of lowercase words excluded from tokens and phrase candidates."""

    words: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, token: str) -> bool:
        return token in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def default(cls) -> "StopwordList":
        """The bundled English list (~175 words)."""
        text = (
            resources.files("simpletags.data")
            .joinpath("stopwords_en.txt")
            .read_text(encoding="utf-8")
        )
        return cls._parse(text.splitlines())

    @classmethod
    def from_file(cls, path: str | Path) -> "StopwordList":
        """Load a replacement list: one word per line, '#' lines ignored."""
        with open(path, encoding="utf-8") as f:
            return cls._parse(f)

    @classmethod
    def _parse(cls, lines: Iterable[str]) -> "StopwordList":
        words = set()
        for line in lines:
            word = line.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
        return cls(frozenset(words))


def segment(text: str) -> list[str]:
    """Split text into normalized lowercase tokens, keeping stopwords.

    This is the raw segmentation shared by :func:`tokenize` and the phrase
    candidate builders, which need stopword positions as phrase boundaries.
    """
    return _TOKEN_RE.findall(text.lower())


def is_word(token: str) -> bool:
    """True unless the token consists solely of digits (and hyphens)."""
    return any(ch.isalpha() for ch in token)


def tokenize(text: str, stopwords: StopwordList | None = None) -> list[str]:
    """Normalize text to a stream of lowercase non-stopword word tokens.

    Unicode-aware segmentation via :func:`segment`; digit-only tokens and
    stopwords are removed. Empty text yields an empty stream.
    """
    if stopwords is None:
        stopwords = StopwordList.default()
    return [t for t in segment(text) if is_word(t) and t not in stopwords]


def _parse_document(obj: object, line_no: int) -> Document:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {line_no}: expected a JSON object")
    doc_id = obj.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusFormatError(f"line {line_no}: missing or empty 'id'")
    fields = {}
    for key in ("title", "summary", "content"):
        value = obj.get(key, "")
        if not isinstance(value, str):
            raise CorpusFormatError(f"line {line_no}: field {key!r} must be a string")
        fields[key] = value
    hint = obj.get("language_hint")
    if hint is not None and not isinstance(hint, str):
        raise CorpusFormatError(f"line {line_no}: 'language_hint' must be a string")
    return Document(id=doc_id, language_hint=hint, **fields)


def ingest_corpus(path: str | Path) -> list[Document]:
    """Read a JSON Lines corpus file into Documents, preserving file order.

    Raises :class:`CorpusFormatError` naming the offending line for malformed
    records and naming the id for duplicates. Missing text fields default to
    empty strings; such documents are accepted here and flagged unprocessable
    downstream.
    """
    path = Path(path)
    documents: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
            doc = _parse_document(obj, line_no)
            if doc.id in seen:
                raise CorpusFormatError(f"duplicate document id {doc.id!r} (line {line_no})")
            seen.add(doc.id)
            documents.append(doc)
    return documents
