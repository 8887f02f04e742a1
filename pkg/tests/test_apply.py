import pytest

from simpletags.apply import (
    TagAssignment,
    apply_corpus,
    apply_tags,
    read_assignments,
    write_assignments,
)
from simpletags.corpus import Document
from simpletags.extract import ComplexTag, ExtractionError, ExtractionRecord
from simpletags.tagset import SimpleTagSet


def make_tagset(*tags):
    ordered = tuple(sorted(tags))
    return SimpleTagSet(tags=ordered, provenance={t: [] for t in ordered})


class _StubExtractor:
    def __init__(self, results=None, fail_ids=(), confidence_threshold=0.5):
        self.results = results or {}
        self.fail_ids = set(fail_ids)
        self.confidence_threshold = confidence_threshold
        self.calls = []

    def extract(self, document):
        self.calls.append(document.id)
        if document.id in self.fail_ids:
            raise ExtractionError(f"boom for {document.id}")
        return self.results.get(document.id, [])


def doc(doc_id, content="some text"):
    return Document(id=doc_id, content=content)


class TestApplyTags:
    def test_tokenize_and_intersect(self):
        stub = _StubExtractor(results={"d1": [
            ComplexTag("quantum computing", 0.9),
            ComplexTag("financial accounting", 0.6),
        ]})
        tagset = make_tagset("quantum", "accounting", "network")
        assignment = apply_tags(doc("d1"), tagset, stub)
        assert assignment.tags == ["accounting", "quantum"]
        assert assignment.source == "extracted"
        assert assignment.error is None
        assert assignment.complex_tag_count == 2
        assert assignment.matched_token_count == 2

    def test_tag_attached_once_despite_repeats(self):
        stub = _StubExtractor(results={"d1": [
            ComplexTag("quantum computing", 0.9),
            ComplexTag("quantum networks", 0.8),
        ]})
        tagset = make_tagset("quantum")
        assignment = apply_tags(doc("d1"), tagset, stub)
        assert assignment.tags == ["quantum"]
        assert assignment.matched_token_count == 2

    def test_zero_match_yields_empty(self):
        stub = _StubExtractor(results={"d1": [ComplexTag("zorvane kelthu", 0.9)]})
        assignment = apply_tags(doc("d1"), make_tagset("quantum"), stub)
        assert assignment.tags == []
        assert assignment.error is None

    def test_empty_extraction_yields_empty(self):
        assignment = apply_tags(doc("d1"), make_tagset("quantum"), _StubExtractor())
        assert assignment.tags == []
        assert assignment.complex_tag_count == 0

    def test_extraction_failure_marks_assignment(self):
        stub = _StubExtractor(fail_ids=["d1"])
        assignment = apply_tags(doc("d1"), make_tagset("quantum"), stub)
        assert assignment.tags == []
        assert "boom" in assignment.error

    def test_threshold_refilters(self):
        stub = _StubExtractor(results={"d1": [
            ComplexTag("quantum", 0.9),
            ComplexTag("network", 0.6),
        ]})
        tagset = make_tagset("quantum", "network")
        assignment = apply_tags(doc("d1"), tagset, stub, confidence_threshold=0.7)
        assert assignment.tags == ["quantum"]

    def test_empty_tagset_rejected(self):
        empty = SimpleTagSet(tags=(), provenance={})
        with pytest.raises(ValueError, match="empty"):
            apply_tags(doc("d1"), empty, _StubExtractor())


class TestApplyCorpus:
    def test_cache_hits_skip_extractor(self):
        docs = [doc("a"), doc("b")]
        cache = {
            "a": ExtractionRecord("a", tags=[ComplexTag("quantum leap", 0.9)]),
            "b": ExtractionRecord("b", tags=[ComplexTag("network", 0.8)]),
        }
        stub = _StubExtractor()
        assignments = apply_corpus(docs, make_tagset("quantum", "network"), stub, cache=cache)
        assert stub.calls == []
        assert [a.source for a in assignments] == ["cache", "cache"]
        assert [a.tags for a in assignments] == [["quantum"], ["network"]]

    def test_all_cached_needs_no_extractor(self):
        cache = {"a": ExtractionRecord("a", tags=[ComplexTag("quantum", 0.9)])}
        assignments = apply_corpus([doc("a")], make_tagset("quantum"), cache=cache)
        assert assignments[0].tags == ["quantum"]

    def test_uncached_without_extractor_rejected(self):
        with pytest.raises(ValueError, match="no extractor"):
            apply_corpus([doc("a")], make_tagset("quantum"))

    def test_mixed_sources_recorded(self):
        docs = [doc(f"d{i}") for i in range(10)]
        cache = {
            f"d{i}": ExtractionRecord(f"d{i}", tags=[ComplexTag("quantum", 0.9)])
            for i in range(5)
        }
        stub = _StubExtractor(
            results={f"d{i}": [ComplexTag("network", 0.8)] for i in range(5, 10)}
        )
        assignments = apply_corpus(docs, make_tagset("quantum", "network"), stub, cache=cache)
        assert [a.source for a in assignments] == ["cache"] * 5 + ["extracted"] * 5
        assert stub.calls == [f"d{i}" for i in range(5, 10)]

    def test_cached_error_propagates(self):
        cache = {"a": ExtractionRecord("a", error="remote extraction failed")}
        assignments = apply_corpus([doc("a")], make_tagset("quantum"), cache=cache)
        assert assignments[0].error == "remote extraction failed"
        assert assignments[0].tags == []
        assert assignments[0].source == "cache"

    def test_cache_refiltered_by_current_threshold(self):
        cache = {"a": ExtractionRecord("a", tags=[ComplexTag("quantum", 0.6)])}
        tagset = make_tagset("quantum")
        keeps = apply_corpus([doc("a")], tagset, cache=cache, confidence_threshold=0.5)
        drops = apply_corpus([doc("a")], tagset, cache=cache, confidence_threshold=0.6)
        assert keeps[0].tags == ["quantum"]
        assert drops[0].tags == []

    def test_closure_and_monotonicity(self):
        docs = [doc(f"d{i}") for i in range(6)]
        cache = {
            f"d{i}": ExtractionRecord(
                f"d{i}",
                tags=[ComplexTag(f"word{i} quantum", 0.9), ComplexTag("network hub", 0.8)],
            )
            for i in range(6)
        }
        small = make_tagset("quantum", "network")
        large = make_tagset("quantum", "network", "hub", "word3")
        small_assignments = apply_corpus(docs, small, cache=cache)
        large_assignments = apply_corpus(docs, large, cache=cache)
        for s, l in zip(small_assignments, large_assignments):
            assert set(s.tags) <= small.as_set()
            assert set(l.tags) <= large.as_set()
            assert set(s.tags) <= set(l.tags)

    def test_idempotent(self):
        cache = {"a": ExtractionRecord("a", tags=[ComplexTag("quantum", 0.9)])}
        first = apply_corpus([doc("a")], make_tagset("quantum"), cache=cache)
        second = apply_corpus([doc("a")], make_tagset("quantum"), cache=cache)
        assert first == second

    def test_failure_does_not_stop_run(self):
        docs = [doc("ok"), doc("bad"), doc("ok2")]
        stub = _StubExtractor(
            results={"ok": [ComplexTag("quantum", 0.9)], "ok2": [ComplexTag("quantum", 0.9)]},
            fail_ids=["bad"],
        )
        assignments = apply_corpus(docs, make_tagset("quantum"), stub)
        assert [a.id for a in assignments] == ["ok", "bad", "ok2"]
        assert assignments[1].error is not None
        assert assignments[0].tags == ["quantum"] and assignments[2].tags == ["quantum"]


class TestAssignmentFile:
    def assignments(self):
        return [
            TagAssignment(id="a", tags=["alpha", "beta"], source="cache"),
            TagAssignment(id="b", tags=[], source="extracted", error="boom"),
        ]

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "assignments.jsonl"
        write_assignments(self.assignments(), path)
        loaded = read_assignments(path)
        assert [a.id for a in loaded] == ["a", "b"]
        assert loaded[0].tags == ["alpha", "beta"]
        assert loaded[0].error is None
        assert loaded[1].error == "boom"
        assert loaded[0].complex_tag_count is None

    def test_file_format(self, tmp_path):
        path = tmp_path / "assignments.jsonl"
        write_assignments(self.assignments(), path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == '{"id":"a","tags":["alpha","beta"],"source":"cache"}'
        assert lines[1] == '{"id":"b","tags":[],"source":"extracted","error":"boom"}'

    def test_write_twice_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_assignments(self.assignments(), a)
        write_assignments(self.assignments(), b)
        assert a.read_bytes() == b.read_bytes()

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "assignments.jsonl"
        path.write_text('{"id":"a","tags":[],"source":"cache"}\n{"id":"b"}\n', encoding="utf-8")
        with pytest.raises(ValueError, match="line 2"):
            read_assignments(path)

    def test_apply_corpus_persists(self, tmp_path):
        path = tmp_path / "assignments.jsonl"
        cache = {"a": ExtractionRecord("a", tags=[ComplexTag("quantum", 0.9)])}
        apply_corpus([doc("a")], make_tagset("quantum"), cache=cache, assignments_path=path)
        assert read_assignments(path)[0].tags == ["quantum"]
