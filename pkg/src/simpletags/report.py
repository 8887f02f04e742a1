"""Corpus-level tagging quality statistics.

Documents are classified by attached-tag count: 0 is untagged, 1-3 under,
4-20 sufficient, 21 and above over. Percentages are computed over tagged
documents only (untagged documents are excluded from the base), rounded
half-up to one decimal. The tag-count histogram keeps exact buckets 1..25
and collapses everything above into a single "25+" bucket.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Sequence

from .apply import TagAssignment

__all__ = [
    "CLASS_LABELS",
    "HISTOGRAM_BUCKETS",
    "TaggingReport",
    "build_report",
    "build_report_from_counts",
    "bucket_label",
    "classify",
    "emit_histogram_csv",
    "read_report",
    "write_histogram_csv",
    "write_report",
]

UNTAGGED = "untagged"
UNDER = "under"
SUFFICIENT = "sufficient"
OVER = "over"

CLASS_LABELS = (UNTAGGED, UNDER, SUFFICIENT, OVER)
HISTOGRAM_BUCKETS = tuple(str(n) for n in range(1, 26)) + ("25+",)


def classify(tag_count: int) -> str:
    """Classification of a document by its attached-tag count."""
    if tag_count < 0:
        raise ValueError("tag count cannot be negative")
    if tag_count == 0:
        return UNTAGGED
    if tag_count <= 3:
        return UNDER
    if tag_count <= 20:
        return SUFFICIENT
    return OVER


def bucket_label(tag_count: int) -> str:
    """Histogram bucket for a positive tag count: "1".."25" or "25+"."""
    if tag_count < 1:
        raise ValueError("histogram buckets cover tagged documents only")
    return str(tag_count) if tag_count <= 25 else "25+"


def _percent(count: int, base: int) -> float:
    exact = Decimal(count) * 100 / Decimal(base)
    return float(exact.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass
class TaggingReport:
    """Aggregate tagging statistics for one assignment run.

    ``class_percentages`` covers the three tagged classes and is None-valued
    when no document carries a tag. ``min_tags``/``max_tags``/``mode_tags``
    describe tagged documents only; mode ties resolve to the smallest count.
    """

    total_documents: int
    tagged_documents: int
    histogram: dict[str, int]
    class_counts: dict[str, int]
    class_percentages: dict[str, float | None]
    min_tags: int | None
    max_tags: int | None
    mode_tags: int | None

    def to_dict(self) -> dict:
        return {
            "total_documents": self.total_documents,
            "tagged_documents": self.tagged_documents,
            "histogram": self.histogram,
            "class_counts": self.class_counts,
            "class_percentages": self.class_percentages,
            "min_tags": self.min_tags,
            "max_tags": self.max_tags,
            "mode_tags": self.mode_tags,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TaggingReport":
        return cls(**{k: obj[k] for k in (
            "total_documents", "tagged_documents", "histogram", "class_counts",
            "class_percentages", "min_tags", "max_tags", "mode_tags",
        )})


def build_report_from_counts(counts: Iterable[int]) -> TaggingReport:
    """Aggregate per-document tag counts into a :class:`TaggingReport`."""
    counts = list(counts)
    histogram = {bucket: 0 for bucket in HISTOGRAM_BUCKETS}
    class_counts = {label: 0 for label in CLASS_LABELS}
    tagged = Counter()
    for count in counts:
        class_counts[classify(count)] += 1
        if count > 0:
            histogram[bucket_label(count)] += 1
            tagged[count] += 1

    n_tagged = sum(tagged.values())
    if n_tagged:
        percentages = {
            label: _percent(class_counts[label], n_tagged)
            for label in (UNDER, SUFFICIENT, OVER)
        }
        min_tags = min(tagged)
        max_tags = max(tagged)
        mode_tags = min(c for c, n in tagged.items() if n == max(tagged.values()))
    else:
        percentages = {label: None for label in (UNDER, SUFFICIENT, OVER)}
        min_tags = max_tags = mode_tags = None

    return TaggingReport(
        total_documents=len(counts),
        tagged_documents=n_tagged,
        histogram=histogram,
        class_counts=class_counts,
        class_percentages=percentages,
        min_tags=min_tags,
        max_tags=max_tags,
        mode_tags=mode_tags,
    )


def build_report(assignments: Sequence[TagAssignment]) -> TaggingReport:
    """Report over assignment records (each contributes its tag count)."""
    return build_report_from_counts(len(a.tags) for a in assignments)


def emit_histogram_csv(report: TaggingReport) -> str:
    """Histogram as CSV text: bucket,count,class_color over all 26 buckets.

    The color column carries the bucket's classification: 1-3 under,
    4-20 sufficient, 21-25 and 25+ over.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bucket", "count", "class_color"])
    for bucket in HISTOGRAM_BUCKETS:
        color = OVER if bucket == "25+" else classify(int(bucket))
        writer.writerow([bucket, report.histogram[bucket], color])
    return out.getvalue()


def write_histogram_csv(report: TaggingReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(emit_histogram_csv(report))


def write_report(report: TaggingReport, path: str | Path) -> None:
    """Persist the report as a single JSON object."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, ensure_ascii=False, separators=(",", ":"))
        f.write("\n")


def read_report(path: str | Path) -> TaggingReport:
    with open(path, encoding="utf-8") as f:
        return TaggingReport.from_dict(json.load(f))
