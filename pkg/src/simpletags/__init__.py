"""Corpus tagging via per-document keyword extraction and topic modeling.

The pipeline derives a compact set of unigram "simple tags" for a whole
corpus: extract confidence-scored keyword phrases per document, fit a topic
model over the keyword bags, pool and deduplicate each topic's top words,
then attach the resulting tags corpus-wide and report coverage statistics.
"""

from .apply import TagAssignment, apply_corpus, apply_tags
from .corpus import Document, StopwordList, ingest_corpus, tokenize
from .extract import (
    ComplexTag,
    CooccurrenceGraphExtractor,
    ExtractionError,
    ExtractionRecord,
    ExtractorConfig,
    RemoteKeywordExtractor,
    TermStats,
    TfidfKeywordExtractor,
    build_extractor,
    extract_corpus,
    tfidf_weight,
)
from .report import TaggingReport, build_report, classify, emit_histogram_csv
from .tagset import SimpleTagSet, generate_tagset, load_tagset, save_tagset
from .topics import (
    GibbsLda,
    KeywordDocs,
    TopicModel,
    Vocabulary,
    build_keyword_documents,
    fit_topic_model,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexTag",
    "CooccurrenceGraphExtractor",
    "Document",
    "ExtractionError",
    "ExtractionRecord",
    "ExtractorConfig",
    "GibbsLda",
    "KeywordDocs",
    "RemoteKeywordExtractor",
    "SimpleTagSet",
    "StopwordList",
    "TagAssignment",
    "TaggingReport",
    "TermStats",
    "TfidfKeywordExtractor",
    "TopicModel",
    "Vocabulary",
    "apply_corpus",
    "apply_tags",
    "build_extractor",
    "build_keyword_documents",
    "build_report",
    "classify",
    "emit_histogram_csv",
    "extract_corpus",
    "fit_topic_model",
    "generate_tagset",
    "ingest_corpus",
    "load_tagset",
    "save_tagset",
    "tfidf_weight",
    "tokenize",
]
