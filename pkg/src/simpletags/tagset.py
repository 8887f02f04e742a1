"""Collapse a fitted topic model into a deduplicated set of unigram tags.

The top ``m`` words of each of the K topics are pooled; stopwords and
purely numeric tokens are dropped, duplicates across topics collapse to a
single tag, and every surviving tag keeps provenance records saying which
topic ranked it where and with what probability.

On disk a tag set is a sorted text file (one tag per line) plus a JSON
sidecar mapping each tag to its provenance list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import StopwordList, is_word
from .topics import TopicModel

__all__ = [
    "SimpleTagSet",
    "generate_tagset",
    "load_tagset",
    "provenance_sidecar_path",
    "save_tagset",
]


def provenance_sidecar_path(tag_path: str | Path) -> Path:
    return Path(str(tag_path) + ".provenance.json")


@dataclass(eq=False)
class SimpleTagSet:
    """Deduplicated unigram tags with per-topic provenance.

    ``provenance[tag]`` lists one entry per (topic, rank) occurrence, rank
    being the 1-based position in that topic's top-m word list. Two tag sets
    compare equal on tags and provenance; the generation parameters and
    filter count are informational and not persisted.
    """

    tags: tuple[str, ...]
    provenance: dict[str, list[dict]]
    n_topics: int | None = None
    m: int | None = None
    n_filtered: int = 0

    def __post_init__(self) -> None:
        for tag in self.tags:
            if not tag or any(ch.isspace() for ch in tag):
                raise ValueError(f"simple tag must be a single token, got {tag!r}")
        if list(self.tags) != sorted(set(self.tags)):
            raise ValueError("tags must be sorted and unique")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimpleTagSet):
            return NotImplemented
        return self.tags == other.tags and self.provenance == other.provenance

    def __contains__(self, tag: str) -> bool:
        return tag in self.provenance or tag in self.tags

    def __len__(self) -> int:
        return len(self.tags)

    def __iter__(self):
        return iter(self.tags)

    def as_set(self) -> frozenset[str]:
        return frozenset(self.tags)


def generate_tagset(
    model: TopicModel, m: int = 30, stopwords: StopwordList | None = None
) -> SimpleTagSet:
    """Pool the top ``m`` words of every topic into a deduplicated tag set.

    Stopwords and tokens without an alphabetic character are filtered out;
    the number of dropped (topic, word) occurrences is reported on the
    result as ``n_filtered``. Provenance keeps each surviving occurrence.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if stopwords is None:
        stopwords = StopwordList.default()
    provenance: dict[str, list[dict]] = {}
    n_filtered = 0
    for topic in range(model.n_topics):
        for rank, (word, probability) in enumerate(model.top_words(topic, m), start=1):
            if not is_word(word) or word in stopwords:
                n_filtered += 1
                continue
            provenance.setdefault(word, []).append(
                {"topic": topic, "rank": rank, "probability": probability}
            )
    tags = tuple(sorted(provenance))
    return SimpleTagSet(
        tags=tags,
        provenance={tag: provenance[tag] for tag in tags},
        n_topics=model.n_topics,
        m=m,
        n_filtered=n_filtered,
    )


def save_tagset(tagset: SimpleTagSet, path: str | Path) -> None:
    """Write the sorted tag file and its provenance sidecar."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        for tag in tagset.tags:
            f.write(tag + "\n")
    with open(provenance_sidecar_path(path), "w", encoding="utf-8") as f:
        json.dump(tagset.provenance, f, ensure_ascii=False, separators=(",", ":"))
        f.write("\n")


def load_tagset(path: str | Path) -> SimpleTagSet:
    """Read a tag file (and its sidecar, when present) back into a tag set.

    Malformed tag lines raise ValueError naming the offending line number.
    """
    path = Path(path)
    tags: list[str] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            tag = line.rstrip("\n")
            if not tag or any(ch.isspace() for ch in tag):
                raise ValueError(f"malformed tag line {line_no} in {path}: {line!r}")
            tags.append(tag)
    if tags != sorted(set(tags)):
        raise ValueError(f"tag file {path} is not sorted and duplicate-free")

    sidecar = provenance_sidecar_path(path)
    provenance: dict[str, list[dict]] = {tag: [] for tag in tags}
    if sidecar.exists():
        with open(sidecar, encoding="utf-8") as f:
            loaded = json.load(f)
        if not isinstance(loaded, dict):
            raise ValueError(f"provenance sidecar {sidecar} must be a JSON object")
        provenance.update(loaded)
    return SimpleTagSet(tags=tuple(tags), provenance=provenance)
