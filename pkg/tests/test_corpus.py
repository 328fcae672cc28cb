"""Preprocessing pipeline and corpus ingestion."""

import json

import numpy as np
import pytest

from mirrormatch.corpus import (
    Document,
    expand_short_forms,
    ingest_corpus,
    load_documents,
    normalize_numbers,
    preprocess,
    tokenize,
)
from mirrormatch.errors import (
    DanglingQrel,
    DuplicateDocId,
    EmptyDocument,
    MissingDocument,
    ParseError,
)


class TestExpandShortForms:
    def test_definition_and_later_occurrences(self):
        text = "congestive heart failure (CHF) persists. CHF worsens"
        assert expand_short_forms(text) == (
            "congestive heart failure persists. congestive heart failure worsens"
        )

    def test_no_parentheses_passthrough(self):
        assert expand_short_forms("no parentheses here") == "no parentheses here"

    def test_non_matching_parenthetical_untouched(self):
        text = "body mass index (BMI) and BMI and (random)"
        assert expand_short_forms(text) == (
            "body mass index and body mass index and (random)"
        )

    def test_case_insensitive_initials(self):
        text = "Chronic Kidney Disease (CKD) and CKD again"
        assert expand_short_forms(text) == (
            "Chronic Kidney Disease and Chronic Kidney Disease again"
        )

    def test_earlier_occurrences_not_replaced(self):
        text = "CHF noted; congestive heart failure (CHF) confirmed"
        out = expand_short_forms(text)
        assert out.startswith("CHF noted;")
        assert out.endswith("congestive heart failure confirmed")

    def test_two_definitions(self):
        text = "body mass index (BMI) and heart rate (HR): BMI, HR"
        out = expand_short_forms(text)
        assert "BMI" not in out and "HR" not in out
        assert out.endswith("body mass index, heart rate")


class TestNormalizeNumbers:
    @pytest.mark.parametrize("token,expected", [
        ("42", "INT"),
        ("3.5", "FLOAT"),
        ("12%", "PERCENT"),
        ("12.5%", "PERCENT"),
        ("p53", "p53"),
        ("insulin", "insulin"),
    ])
    def test_rules(self, token, expected):
        assert normalize_numbers(token) == expected

    def test_idempotent_on_own_output(self):
        rng = np.random.default_rng(3)
        pool = ["42", "3.5", "12%", "p53", "abc", "0", "00.5", "x9y"]
        for _ in range(200):
            token = pool[rng.integers(len(pool))]
            once = normalize_numbers(token)
            assert normalize_numbers(once) == once


class TestPreprocess:
    def test_all_stopwords_is_empty(self):
        doc = Document(doc_id="d", title="A of the")
        with pytest.raises(EmptyDocument):
            preprocess(doc, {"a", "of", "the"})

    def test_pipeline_order(self):
        doc = Document(doc_id="d", title="Insulin 12% dose")
        seq = preprocess(doc, set())
        assert seq.terms == ("insulin", "PERCENT", "dose")
        assert seq.length == 3

    def test_vocab_filtering(self):
        doc = Document(doc_id="d", title="Insulin 12% dose")
        seq = preprocess(doc, set(), vocab={"insulin"})
        assert seq.terms == ("insulin",)
        assert seq.length == 1

    def test_field_order_title_abstract_keywords(self):
        doc = Document(doc_id="d", title="alpha", abstract="beta", keywords=("gamma",))
        assert preprocess(doc, set()).terms == ("alpha", "beta", "gamma")

    def test_short_form_expansion_spans_fields(self):
        doc = Document(doc_id="d", title="body mass index (BMI) study",
                       abstract="BMI rose")
        seq = preprocess(doc, set())
        assert "bmi" not in seq.terms
        assert seq.terms.count("body") == 2

    def test_deterministic(self):
        doc = Document(doc_id="d", title="Insulin 12% dose", abstract="42 trials of p53")
        a = preprocess(doc, {"of"})
        b = preprocess(doc, {"of"})
        assert a == b

    def test_positions_contiguous_after_filtering(self):
        rng = np.random.default_rng(11)
        words = ["alpha", "beta", "gamma", "delta", "42", "7%", "p53"]
        for _ in range(50):
            text = " ".join(words[i] for i in rng.integers(0, len(words), size=20))
            doc = Document(doc_id="d", title=text)
            vocab = {"alpha", "beta", "INT", "p53"}
            try:
                seq = preprocess(doc, {"gamma"}, vocab=vocab)
            except EmptyDocument:
                continue
            assert all(t in vocab for t in seq.terms)
            assert seq.length == len(seq.terms)

    def test_tokenizer_splits_on_punctuation(self):
        assert tokenize("alpha-beta, gamma; 3.5 (x)") == ["alpha", "beta", "gamma", "3.5", "x"]


def _write_corpus(tmp_path, lines):
    path = tmp_path / "corpus.jsonl"
    path.write_text("\n".join(json.dumps(obj) for obj in lines) + "\n")
    return path


def _write_topics(tmp_path, topics):
    path = tmp_path / "topics.json"
    path.write_text(json.dumps(topics))
    return path


class TestIngest:
    def test_two_line_jsonl(self, tmp_path):
        path = _write_corpus(tmp_path, [
            {"doc_id": "a", "title": "one", "abstract": "", "keywords": []},
            {"doc_id": "b", "title": "two", "abstract": "", "keywords": []},
        ])
        docs = load_documents(path)
        assert set(docs) == {"a", "b"}

    def test_duplicate_doc_id(self, tmp_path):
        path = _write_corpus(tmp_path, [
            {"doc_id": "a", "title": "one"},
            {"doc_id": "a", "title": "two"},
        ])
        with pytest.raises(DuplicateDocId):
            load_documents(path)

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"doc_id": "a", "title": "x"}\nnot json\n')
        with pytest.raises(ParseError) as err:
            load_documents(path)
        assert err.value.line == 2

    def test_dangling_qrel(self, tmp_path):
        corpus = _write_corpus(tmp_path, [{"doc_id": "a", "title": "x"}])
        topics = _write_topics(tmp_path, {"sr_id": "SR", "candidates": ["a"]})
        qrels = tmp_path / "qrels.txt"
        qrels.write_text("SR 0 missing 1\n")
        with pytest.raises(DanglingQrel):
            ingest_corpus(corpus, topics, qrels)

    def test_duplicate_candidate_in_topic(self, tmp_path):
        corpus = _write_corpus(tmp_path, [{"doc_id": "a", "title": "x"}])
        topics = _write_topics(tmp_path, {"sr_id": "SR", "candidates": ["a", "a"]})
        with pytest.raises(DuplicateDocId):
            ingest_corpus(corpus, topics)

    def test_candidate_missing_from_store(self, tmp_path):
        corpus = _write_corpus(tmp_path, [{"doc_id": "a", "title": "x"}])
        topics = _write_topics(tmp_path, {"sr_id": "SR", "candidates": ["a", "ghost"]})
        with pytest.raises(MissingDocument):
            ingest_corpus(corpus, topics)

    def test_qrels_resolved_per_topic(self, tmp_path):
        corpus = _write_corpus(tmp_path, [{"doc_id": "a", "title": "x"},
                                          {"doc_id": "b", "title": "y"}])
        topics = _write_topics(tmp_path, [{"sr_id": "SR", "candidates": ["a", "b"]}])
        qrels = tmp_path / "qrels.txt"
        qrels.write_text("SR 0 a 1\nSR 0 b 0\n")
        ingest = ingest_corpus(corpus, topics, qrels)
        assert ingest.topics["SR"].relevant_ids == ["a"]
        assert ingest.topics["SR"].nonrelevant_ids == ["b"]
