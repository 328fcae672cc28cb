"""Document ingestion and the preprocessing pipeline.

Raw records (title, abstract, keywords) are turned into position-indexed term
sequences: short forms are expanded to their long forms, numeric tokens are
collapsed to INT/FLOAT/PERCENT sentinels, stopwords are dropped, and the
surviving tokens are re-indexed contiguously from position 1.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import (
    DanglingQrel,
    DuplicateDocId,
    EmptyDocument,
    MissingDocument,
    ParseError,
)


@dataclass(frozen=True)
class Document:
    """Raw document record; preprocessing never mutates it."""

    doc_id: str
    title: str
    abstract: str = ""
    keywords: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")


@dataclass(frozen=True)
class SRTopic:
    """One systematic review: its candidate pool and relevance judgments.

    ``qrels`` maps doc_id -> bool (relevant / non-relevant). Judgments may be
    absent (empty map) when a review is screened interactively; when present,
    every judged doc_id must be a candidate.
    """

    sr_id: str
    candidates: frozenset[str]
    qrels: dict[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        dangling = set(self.qrels) - self.candidates
        if dangling:
            raise DanglingQrel(
                f"topic {self.sr_id}: qrels reference non-candidates {sorted(dangling)[:5]}"
            )

    @property
    def relevant_ids(self) -> list[str]:
        return sorted(d for d, rel in self.qrels.items() if rel)

    @property
    def nonrelevant_ids(self) -> list[str]:
        return sorted(d for d, rel in self.qrels.items() if not rel)


@dataclass(frozen=True)
class TermSequence:
    """Ordered token list after preprocessing; term i occupies position i (1-based)."""

    doc_id: str
    terms: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)


# --- short-form expansion ----------------------------------------------------

# A parenthesized alphabetic token of >= 2 letters is a short-form candidate.
_SHORT_FORM_RE = re.compile(r"\(\s*([A-Za-z]{2,})\s*\)")
_EDGE_PUNCT_RE = re.compile(r"^\W+|\W+$")


def expand_short_forms(text: str) -> str:
    """Replace defined short forms with their long forms.

    A definition is a parenthesized token whose letters match, in order and
    case-insensitively, the initial letters of the words immediately before
    the parenthesis ("congestive heart failure (CHF)"). The defining "(CHF)"
    is dropped and every later standalone "CHF" becomes the long form.
    Parenthesized tokens with no matching phrase are left untouched.
    """
    pos = 0
    while True:
        m = _SHORT_FORM_RE.search(text, pos)
        if m is None:
            return text
        short = m.group(1)
        k = len(short)
        preceding = text[: m.start()].split()
        if len(preceding) < k:
            pos = m.end()
            continue
        words = [_EDGE_PUNCT_RE.sub("", w) for w in preceding[-k:]]
        if not all(w and w[0].lower() == c.lower() for w, c in zip(words, short)):
            pos = m.end()
            continue
        long_form = " ".join(words)
        prefix = text[: m.start()].rstrip()
        rest = re.sub(rf"\b{re.escape(short)}\b", long_form, text[m.end():])
        text = prefix + rest
        pos = len(prefix)


# --- numeric normalization ---------------------------------------------------

_INT_RE = re.compile(r"^\d+$")
_FLOAT_RE = re.compile(r"^\d+\.\d+$")
_PERCENT_RE = re.compile(r"^\d+(\.\d+)?%$")

# Numeric forms first so "12%" and "3.5" survive as single tokens; the percent
# sign is retained only when attached to a number.
_TOKEN_RE = re.compile(r"\d+\.\d+%|\d+%|\d+\.\d+|[a-z0-9]+")


def normalize_numbers(token: str) -> str:
    """Collapse pure numeric tokens to INT / FLOAT / PERCENT sentinels."""
    if _INT_RE.match(token):
        return "INT"
    if _FLOAT_RE.match(token):
        return "FLOAT"
    if _PERCENT_RE.match(token):
        return "PERCENT"
    return token


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries."""
    return _TOKEN_RE.findall(text.lower())


def preprocess(
    doc: Document,
    stopwords: set[str],
    vocab: set[str] | None = None,
) -> TermSequence:
    """Run the full pipeline on one document.

    Concatenates title + abstract + keywords, expands short forms, lowercases
    and tokenizes, normalizes numbers, removes stopwords, and (when ``vocab``
    is given) drops out-of-vocabulary tokens. Raises :class:`EmptyDocument`
    if nothing survives.
    """
    text = " ".join([doc.title, doc.abstract, *doc.keywords])
    text = expand_short_forms(text)
    terms = [normalize_numbers(t) for t in tokenize(text)]
    terms = [t for t in terms if t not in stopwords]
    if vocab is not None:
        terms = [t for t in terms if t in vocab]
    if not terms:
        raise EmptyDocument(f"document {doc.doc_id}: no tokens survive preprocessing")
    return TermSequence(doc_id=doc.doc_id, terms=tuple(terms))


def default_stopwords() -> set[str]:
    """Bundled English stopword list (one token per line, '#' comments)."""
    text = resources.files("mirrormatch.data").joinpath("stopwords_en.txt").read_text()
    return load_stopwords_text(text)


def load_stopwords_text(text: str) -> set[str]:
    words = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line)
    return words


def load_stopwords(path: str | Path) -> set[str]:
    return load_stopwords_text(Path(path).read_text())


# --- ingest ------------------------------------------------------------------

@dataclass
class Ingest:
    """Parsed corpus bundle: document store plus resolved topics."""

    documents: dict[str, Document]
    topics: dict[str, SRTopic]


def load_documents(path: str | Path) -> dict[str, Document]:
    """Read a JSONL corpus: one {doc_id, title, abstract, keywords} per line."""
    path = Path(path)
    docs: dict[str, Document] = {}
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", str(path), lineno) from exc
            if not isinstance(obj, dict) or "doc_id" not in obj:
                raise ParseError("object with a 'doc_id' field expected", str(path), lineno)
            doc_id = str(obj["doc_id"])
            if not doc_id:
                raise ParseError("doc_id must be non-empty", str(path), lineno)
            if doc_id in docs:
                raise DuplicateDocId(f"{path}:{lineno}: duplicate doc_id {doc_id!r}")
            keywords = obj.get("keywords") or []
            if not isinstance(keywords, list):
                raise ParseError("'keywords' must be a list", str(path), lineno)
            docs[doc_id] = Document(
                doc_id=doc_id,
                title=str(obj.get("title", "")),
                abstract=str(obj.get("abstract", "")),
                keywords=tuple(str(k) for k in keywords),
            )
    return docs


def load_topics(path: str | Path) -> list[dict]:
    """Read a topic file: one {sr_id, candidates} object or a list of them."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", str(path), exc.lineno) from exc
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise ParseError("topic file must hold an object or a list of objects", str(path))
    topics = []
    for obj in data:
        if not isinstance(obj, dict) or "sr_id" not in obj or "candidates" not in obj:
            raise ParseError("each topic needs 'sr_id' and 'candidates'", str(path))
        topics.append({"sr_id": str(obj["sr_id"]),
                       "candidates": [str(c) for c in obj["candidates"]]})
    return topics


def load_qrels(path: str | Path) -> dict[str, dict[str, bool]]:
    """Read TREC-style qrels: "<sr_id> 0 <doc_id> <0|1>" per line."""
    path = Path(path)
    qrels: dict[str, dict[str, bool]] = {}
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ParseError("expected 4 whitespace-separated fields", str(path), lineno)
            sr_id, _, doc_id, label = parts
            if label not in ("0", "1"):
                raise ParseError(f"relevance label must be 0 or 1, got {label!r}", str(path), lineno)
            qrels.setdefault(sr_id, {})[doc_id] = label == "1"
    return qrels


def ingest_corpus(
    corpus_path: str | Path,
    topics_path: str | Path,
    qrels_path: str | Path | None = None,
) -> Ingest:
    """Load and cross-validate corpus, topics, and (optionally) qrels."""
    documents = load_documents(corpus_path)
    raw_topics = load_topics(topics_path)
    qrels = load_qrels(qrels_path) if qrels_path is not None else {}

    topics: dict[str, SRTopic] = {}
    for raw in raw_topics:
        sr_id = raw["sr_id"]
        if sr_id in topics:
            raise ParseError(f"duplicate topic {sr_id!r}", str(topics_path))
        seen: set[str] = set()
        for doc_id in raw["candidates"]:
            if doc_id in seen:
                raise DuplicateDocId(f"topic {sr_id}: duplicate candidate {doc_id!r}")
            seen.add(doc_id)
            if doc_id not in documents:
                raise MissingDocument(f"topic {sr_id}: candidate {doc_id!r} not in corpus")
        topic_qrels = qrels.get(sr_id, {})
        for doc_id in topic_qrels:
            if doc_id not in seen:
                raise DanglingQrel(
                    f"topic {sr_id}: qrel references unknown doc {doc_id!r}"
                )
        topics[sr_id] = SRTopic(sr_id=sr_id, candidates=frozenset(seen), qrels=topic_qrels)

    for sr_id in qrels:
        if sr_id not in topics:
            raise DanglingQrel(f"qrels reference unknown topic {sr_id!r}")
    return Ingest(documents=documents, topics=topics)
