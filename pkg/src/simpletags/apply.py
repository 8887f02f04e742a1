"""Attach simple tags to documents by intersecting their complex tags.

A document's complex tags (freshly extracted, or reused from a cache) are
split into unigrams with the corpus tokenizer rules; every simple tag equal
to one of those unigrams is attached. Matching is exact string equality on
normalized tokens: no stemming, no fuzzy matching, and a tag attaches at
most once per document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Document, is_word, segment
from .extract import ComplexTag, ExtractionError, ExtractionRecord
from .tagset import SimpleTagSet

__all__ = [
    "TagAssignment",
    "apply_corpus",
    "apply_tags",
    "read_assignments",
    "write_assignments",
]


@dataclass
class TagAssignment:
    """Simple tags attached to one document.

    ``complex_tag_count`` is the number of complex tags that survived the
    confidence threshold and ``matched_token_count`` the number of their
    unigram occurrences found in the tag set; both are in-memory diagnostics
    and are not persisted to the assignment file.
    """

    id: str
    tags: list[str] = field(default_factory=list)
    source: str = "extracted"
    error: str | None = None
    complex_tag_count: int | None = None
    matched_token_count: int | None = None

    @property
    def n_tags(self) -> int:
        return len(self.tags)


def _attach(
    doc_id: str,
    complex_tags: Sequence[ComplexTag],
    members: frozenset[str],
    source: str,
    error: str | None = None,
) -> TagAssignment:
    matched: set[str] = set()
    matched_occurrences = 0
    for tag in complex_tags:
        for token in segment(tag.phrase):
            if is_word(token) and token in members:
                matched.add(token)
                matched_occurrences += 1
    return TagAssignment(
        id=doc_id,
        tags=sorted(matched),
        source=source,
        error=error,
        complex_tag_count=len(complex_tags),
        matched_token_count=matched_occurrences,
    )


def apply_tags(
    document: Document,
    tagset: SimpleTagSet,
    extractor,
    confidence_threshold: float | None = None,
) -> TagAssignment:
    """Extract complex tags for ``document`` and attach matching simple tags.

    Extraction failure marks the assignment with the error and attaches
    nothing; the caller's corpus run continues. ``confidence_threshold``
    defaults to the extractor's own threshold and exists for the cached
    path of :func:`apply_corpus`, where no extractor runs.
    """
    if len(tagset) == 0:
        raise ValueError("cannot apply an empty tag set")
    members = tagset.as_set()
    try:
        complex_tags = extractor.extract(document)
    except ExtractionError as exc:
        return TagAssignment(
            id=document.id, source="extracted", error=str(exc),
            complex_tag_count=0, matched_token_count=0,
        )
    if confidence_threshold is not None:
        complex_tags = [t for t in complex_tags if t.confidence > confidence_threshold]
    return _attach(document.id, complex_tags, members, source="extracted")


def apply_corpus(
    documents: Sequence[Document],
    tagset: SimpleTagSet,
    extractor=None,
    cache: Mapping[str, ExtractionRecord] | None = None,
    confidence_threshold: float = 0.5,
    assignments_path: str | Path | None = None,
) -> list[TagAssignment]:
    """Attach simple tags to every document, in input order.

    Documents with a cache entry reuse its complex tags (re-filtered by
    ``confidence_threshold``, the same strict > rule as extraction) and
    never invoke the extractor; a cached extraction error propagates to the
    assignment. Documents without a cache entry require ``extractor``.
    When ``assignments_path`` is given the result is persisted as JSON Lines.
    """
    if len(tagset) == 0:
        raise ValueError("cannot apply an empty tag set")
    members = tagset.as_set()
    cache = cache or {}
    assignments: list[TagAssignment] = []
    for doc in documents:
        record = cache.get(doc.id)
        if record is not None:
            kept = [t for t in record.tags if t.confidence > confidence_threshold]
            assignments.append(
                _attach(doc.id, kept, members, source="cache", error=record.error)
            )
            continue
        if extractor is None:
            raise ValueError(
                f"document {doc.id!r} has no cache entry and no extractor was given"
            )
        assignments.append(apply_tags(doc, tagset, extractor, confidence_threshold))
    if assignments_path is not None:
        write_assignments(assignments, assignments_path)
    return assignments


def _assignment_to_json(assignment: TagAssignment) -> str:
    obj: dict = {
        "id": assignment.id,
        "tags": assignment.tags,
        "source": assignment.source,
    }
    if assignment.error is not None:
        obj["error"] = assignment.error
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_assignments(assignments: Iterable[TagAssignment], path: str | Path) -> None:
    """Write assignments as JSON Lines (id, sorted tags, source, error?)."""
    with open(path, "w", encoding="utf-8") as f:
        for assignment in assignments:
            f.write(_assignment_to_json(assignment) + "\n")


def read_assignments(path: str | Path) -> list[TagAssignment]:
    """Read an assignment file back, preserving order. The diagnostic counts
    are not persisted, so they come back as None."""
    assignments: list[TagAssignment] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            try:
                obj = json.loads(line)
                assignments.append(
                    TagAssignment(
                        id=obj["id"],
                        tags=list(obj["tags"]),
                        source=obj["source"],
                        error=obj.get("error"),
                    )
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(
                    f"malformed assignment line {line_no} in {path}: {exc}"
                ) from exc
    return assignments
