"""Command-line pipeline: extract, model, apply, report, or run everything.

Stages communicate through files in the output directory, so any stage can
be re-run against existing upstream artifacts (for example refitting the
topic model against a stable extraction cache):

    complex_tags.jsonl   per-document complex tags (extract)
    model.json           fitted topic model (model)
    tags.txt             simple tag set, plus tags.txt.provenance.json (model)
    assignments.jsonl    per-document attached tags (apply)
    report.json          corpus statistics, plus histogram.csv (report)

Configuration is a single flat JSON object; command-line flags override
file values. Exit codes: 0 success (per-document failures are warnings),
2 usage or precondition error, 1 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .apply import apply_corpus, read_assignments
from .corpus import CorpusFormatError, Document, ingest_corpus
from .extract import (
    ExtractorConfig,
    build_extractor,
    extract_corpus,
    read_tag_cache,
)
from .report import build_report, write_histogram_csv, write_report
from .tagset import generate_tagset, load_tagset, save_tagset
from .topics import fit_topic_model

__all__ = ["PipelineConfig", "main"]


class CliError(Exception):
    """Usage or precondition failure; maps to exit code 2."""


@dataclass
class PipelineConfig:
    """Flat pipeline configuration; the JSON config file mirrors these fields."""

    corpus: str | None = None
    subset: list[str] | str | None = None
    out: str = "simpletags-out"
    extractor: str = "tfidf"
    endpoint: str | None = None
    api_token: str | None = None
    confidence_threshold: float = 0.5
    max_phrase_len: int = 4
    max_tags_per_doc: int = 50
    concurrency: int = 8
    timeout: float = 30.0
    max_attempts: int = 3
    backoff: float = 0.5
    topics: int = 30
    alpha: float | None = None
    beta: float = 0.01
    sweeps: int = 1000
    burn_in: int = 800
    thinning: int = 10
    seed: int = 7
    top_words: int = 30


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(PipelineConfig)}

_FLAG_FIELDS = (
    "corpus",
    "subset",
    "out",
    "extractor",
    "endpoint",
    "topics",
    "top_words",
    "confidence_threshold",
    "alpha",
    "beta",
    "sweeps",
    "burn_in",
    "seed",
)


@dataclass(frozen=True)
class StagePaths:
    out_dir: Path
    cache: Path
    model: Path
    tags: Path
    assignments: Path
    report: Path
    histogram: Path


def stage_paths(out_dir: str | Path) -> StagePaths:
    out = Path(out_dir)
    return StagePaths(
        out_dir=out,
        cache=out / "complex_tags.jsonl",
        model=out / "model.json",
        tags=out / "tags.txt",
        assignments=out / "assignments.jsonl",
        report=out / "report.json",
        histogram=out / "histogram.csv",
    )


def load_config(args: argparse.Namespace) -> PipelineConfig:
    """Merge defaults, the optional JSON config file, and flag overrides."""
    values: dict = {}
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise CliError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise CliError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CliError(f"config file {path} must hold a single JSON object")
        unknown = sorted(set(loaded) - _CONFIG_FIELDS)
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(unknown)}")
        values.update(loaded)
    for name in _FLAG_FIELDS:
        flag_value = getattr(args, name)
        if flag_value is not None:
            values[name] = flag_value
    return PipelineConfig(**values)


def _load_corpus(config: PipelineConfig) -> list[Document]:
    if not config.corpus:
        raise CliError("no corpus given; set 'corpus' in the config or pass --corpus")
    path = Path(config.corpus)
    if not path.is_file():
        raise CliError(f"corpus file not found: {path}")
    try:
        return ingest_corpus(path)
    except CorpusFormatError as exc:
        raise CliError(str(exc)) from exc


def _resolve_subset(config: PipelineConfig) -> list[str] | None:
    """Subset selector: a list of ids inline, or a path to an id-per-line file."""
    subset = config.subset
    if subset is None:
        return None
    if isinstance(subset, str):
        path = Path(subset)
        if not path.is_file():
            raise CliError(f"subset file not found: {path}")
        ids = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
        return [i for i in ids if i]
    return list(subset)


def _select_documents(documents: list[Document], subset: list[str] | None) -> list[Document]:
    if subset is None:
        return documents
    wanted = set(subset)
    missing = wanted - {doc.id for doc in documents}
    if missing:
        raise CliError(f"subset ids not present in corpus: {', '.join(sorted(missing))}")
    return [doc for doc in documents if doc.id in wanted]


def _extractor_config(config: PipelineConfig) -> ExtractorConfig:
    try:
        return ExtractorConfig(
            kind=config.extractor,
            confidence_threshold=config.confidence_threshold,
            max_phrase_len=config.max_phrase_len,
            max_tags_per_doc=config.max_tags_per_doc,
            endpoint=config.endpoint,
            api_token=config.api_token,
            concurrency=config.concurrency,
            timeout=config.timeout,
            max_attempts=config.max_attempts,
            backoff=config.backoff,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _fitted_extractor(config: PipelineConfig, documents: list[Document]):
    extractor = build_extractor(_extractor_config(config))
    extractor.fit(documents)
    return extractor


def cmd_extract(config: PipelineConfig) -> int:
    documents = _load_corpus(config)
    selected = _select_documents(documents, _resolve_subset(config))
    if not selected:
        raise CliError("extraction subset is empty")
    extractor = _fitted_extractor(config, selected)
    paths = stage_paths(config.out)
    paths.out_dir.mkdir(parents=True, exist_ok=True)
    concurrency = config.concurrency if config.extractor == "remote" else 1
    records = extract_corpus(selected, extractor, cache_path=paths.cache, concurrency=concurrency)
    failures = sum(1 for r in records.values() if r.error is not None)
    print(f"extracted {len(records)} documents ({failures} failed) -> {paths.cache}")
    return 0


def cmd_model(config: PipelineConfig) -> int:
    paths = stage_paths(config.out)
    if not paths.cache.is_file():
        raise CliError(f"complex-tag cache not found: {paths.cache} (run extract first)")
    records = read_tag_cache(paths.cache)
    if not records:
        raise CliError(f"complex-tag cache is empty: {paths.cache}")
    try:
        model = fit_topic_model(
            records.values(),
            n_topics=config.topics,
            alpha=config.alpha,
            beta=config.beta,
            sweeps=config.sweeps,
            burn_in=config.burn_in,
            thinning=config.thinning,
            seed=config.seed,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    model.save(paths.model)
    tagset = generate_tagset(model, m=config.top_words)
    save_tagset(tagset, paths.tags)
    bound = config.topics * config.top_words
    print(
        f"simple tags: {len(tagset)} (bound {bound} = {config.topics} topics x "
        f"{config.top_words} words, dedupe ratio {len(tagset) / bound:.3f}, "
        f"filtered {tagset.n_filtered})"
    )
    print(f"model -> {paths.model}; tags -> {paths.tags}")
    return 0


def cmd_apply(config: PipelineConfig) -> int:
    paths = stage_paths(config.out)
    if not paths.tags.is_file():
        raise CliError(f"tag file not found: {paths.tags} (run model first)")
    try:
        tagset = load_tagset(paths.tags)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    documents = _load_corpus(config)
    cache = read_tag_cache(paths.cache) if paths.cache.is_file() else {}
    uncached = [doc for doc in documents if doc.id not in cache]
    extractor = _fitted_extractor(config, documents) if uncached else None
    paths.out_dir.mkdir(parents=True, exist_ok=True)
    assignments = apply_corpus(
        documents,
        tagset,
        extractor=extractor,
        cache=cache,
        confidence_threshold=config.confidence_threshold,
        assignments_path=paths.assignments,
    )
    from_cache = sum(1 for a in assignments if a.source == "cache")
    failures = sum(1 for a in assignments if a.error is not None)
    print(
        f"applied tags to {len(assignments)} documents "
        f"({from_cache} from cache, {failures} failed) -> {paths.assignments}"
    )
    return 0


def cmd_report(config: PipelineConfig) -> int:
    paths = stage_paths(config.out)
    if not paths.assignments.is_file():
        raise CliError(f"assignment file not found: {paths.assignments} (run apply first)")
    try:
        assignments = read_assignments(paths.assignments)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    report = build_report(assignments)
    paths.out_dir.mkdir(parents=True, exist_ok=True)
    write_report(report, paths.report)
    write_histogram_csv(report, paths.histogram)

    def pct(label: str) -> str:
        value = report.class_percentages[label]
        return "n/a" if value is None else f"{value:.1f}%"

    print(
        f"under: {pct('under')}  sufficient: {pct('sufficient')}  over: {pct('over')}  "
        f"untagged: {report.class_counts['untagged']}"
    )
    print(f"report -> {paths.report}; histogram -> {paths.histogram}")
    return 0


def cmd_run(config: PipelineConfig) -> int:
    cmd_extract(config)
    cmd_model(config)
    cmd_apply(config)
    cmd_report(config)
    return 0


_COMMANDS = {
    "extract": cmd_extract,
    "model": cmd_model,
    "apply": cmd_apply,
    "report": cmd_report,
    "run": cmd_run,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat JSON config file")
    shared.add_argument("--corpus", help="corpus JSONL path (overrides config)")
    shared.add_argument("--subset", help="file with one document id per line")
    shared.add_argument("--out", help="output directory for stage files")
    shared.add_argument(
        "--extractor", choices=["tfidf", "graph", "remote"], help="extractor kind"
    )
    shared.add_argument("--endpoint", help="remote extractor URL")
    shared.add_argument("--topics", type=int, help="number of topics K")
    shared.add_argument("--top-words", type=int, help="top words per topic m")
    shared.add_argument(
        "--confidence-threshold", type=float, help="strict lower bound on tag confidence"
    )
    shared.add_argument("--alpha", type=float, help="document-topic prior (default 50/K)")
    shared.add_argument("--beta", type=float, help="topic-word prior")
    shared.add_argument("--sweeps", type=int, help="total Gibbs sweeps")
    shared.add_argument("--burn-in", type=int, help="sweeps discarded before averaging")
    shared.add_argument("--seed", type=int, help="random seed")

    parser = argparse.ArgumentParser(
        prog="simpletags",
        description="Derive, apply, and report a compact unigram tag set for a corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("extract", parents=[shared], help="extract complex tags to the cache")
    sub.add_parser("model", parents=[shared], help="fit the topic model and tag set")
    sub.add_parser("apply", parents=[shared], help="attach simple tags to the corpus")
    sub.add_parser("report", parents=[shared], help="compute tagging statistics")
    sub.add_parser("run", parents=[shared], help="run all four stages")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        return _COMMANDS[args.command](config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive catch-all
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
