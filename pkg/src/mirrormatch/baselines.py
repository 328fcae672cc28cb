"""Comparison scorers: retrieval models and document similarity measures.

All scorers consume preprocessed term sequences. Collection-level statistics
(document frequencies, collection term frequencies, average length) are built
once per review topic and shared.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .corpus import TermSequence
from .embeddings import EmbeddingTable, cosine
from .errors import EmptySequence, SolverFailure, UndefinedLog

# Abstracts stay far below this; a cap keeps the transport LP bounded.
WMD_MAX_DISTINCT = 500


@dataclass(frozen=True)
class CollectionStats:
    """Per-topic corpus statistics shared by BM25 / QL / TF-IDF."""

    doc_count: int
    doc_freq: dict[str, int]
    avg_doc_len: float
    coll_term_freq: dict[str, int]
    total_terms: int

    @classmethod
    def from_sequences(cls, sequences) -> "CollectionStats":
        doc_freq: Counter[str] = Counter()
        ctf: Counter[str] = Counter()
        n_docs = 0
        total = 0
        for seq in sequences:
            n_docs += 1
            total += len(seq.terms)
            tf = Counter(seq.terms)
            ctf.update(tf)
            doc_freq.update(tf.keys())
        if n_docs == 0 or total == 0:
            raise EmptySequence("collection statistics need at least one non-empty document")
        return cls(doc_count=n_docs, doc_freq=dict(doc_freq),
                   avg_doc_len=total / n_docs, coll_term_freq=dict(ctf),
                   total_terms=total)


def _bm25_idf(stats: CollectionStats, term: str) -> float:
    df = stats.doc_freq.get(term, 0)
    return math.log((stats.doc_count - df + 0.5) / (df + 0.5) + 1.0)


def _bm25_weight(tf: int, doc_len: int, stats: CollectionStats, k1: float, b: float) -> float:
    denom = tf + k1 * (1.0 - b + b * doc_len / stats.avg_doc_len)
    return tf * (k1 + 1.0) / denom


def bm25_score(q: TermSequence, d: TermSequence, stats: CollectionStats,
               k1: float = 1.5, b: float = 0.75) -> float:
    """Okapi BM25 of document d for query q (sum over distinct query terms)."""
    d_tf = Counter(d.terms)
    score = 0.0
    for term in sorted(set(q.terms)):
        tf = d_tf.get(term, 0)
        if tf == 0:
            continue
        score += _bm25_idf(stats, term) * _bm25_weight(tf, len(d.terms), stats, k1, b)
    return score


def ql_jm_score(q: TermSequence, d: TermSequence, stats: CollectionStats,
                jm_lambda: float = 0.2) -> float:
    """Query likelihood with Jelinek-Mercer smoothing.

    ``jm_lambda`` is the weight on the collection model; pass ``1 - x`` to
    read the parameter as the document weight instead.
    """
    if not (0.0 < jm_lambda < 1.0):
        raise ValueError("jm_lambda must lie in (0, 1)")
    d_tf = Counter(d.terms)
    d_len = len(d.terms)
    score = 0.0
    for term in q.terms:
        p_doc = d_tf.get(term, 0) / d_len if d_len else 0.0
        p_coll = stats.coll_term_freq.get(term, 0) / stats.total_terms
        p = (1.0 - jm_lambda) * p_doc + jm_lambda * p_coll
        if p <= 0.0:
            raise UndefinedLog(f"term {term!r} has zero probability everywhere")
        score += math.log(p)
    return score


def _tfidf_vector(d: TermSequence, stats: CollectionStats) -> dict[str, float]:
    weights = {}
    for term, tf in Counter(d.terms).items():
        df = stats.doc_freq.get(term, 0)
        if df > 0:
            weights[term] = tf * math.log(stats.doc_count / df)
    return weights


def _sparse_cosine(u: dict[str, float], v: dict[str, float]) -> float:
    # canonical term order keeps the measure exactly symmetric
    nu = math.sqrt(sum(u[t] * u[t] for t in sorted(u)))
    nv = math.sqrt(sum(v[t] * v[t] for t in sorted(v)))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if u == v:
        return 1.0
    dot = sum(u[t] * v[t] for t in sorted(u.keys() & v.keys()))
    return min(1.0, max(-1.0, dot / (nu * nv)))


def tfidf_cosine(d1: TermSequence, d2: TermSequence, stats: CollectionStats) -> float:
    """Cosine between tf * ln(N/df) weighted bag-of-words vectors."""
    return _sparse_cosine(_tfidf_vector(d1, stats), _tfidf_vector(d2, stats))


def avgemb_cosine(d1: TermSequence, d2: TermSequence, emb: EmbeddingTable) -> float:
    """Cosine between per-document mean word vectors (token occurrences)."""
    if not d1.terms or not d2.terms:
        raise EmptySequence("cannot average an empty document")
    v1 = emb.vectors[emb.indices(d1.terms)].mean(axis=0)
    v2 = emb.vectors[emb.indices(d2.terms)].mean(axis=0)
    return cosine(v1, v2)


def tf_inner(d1: TermSequence, d2: TermSequence) -> float:
    """Inner product of raw term-frequency vectors."""
    tf1 = Counter(d1.terms)
    tf2 = Counter(d2.terms)
    if len(tf2) < len(tf1):
        tf1, tf2 = tf2, tf1
    return float(sum(c * tf2.get(t, 0) for t, c in tf1.items()))


def ok_sim(d1: TermSequence, d2: TermSequence, stats: CollectionStats,
           k1: float = 1.5, b: float = 0.75) -> float:
    """Inner product of per-document BM25 term weights over shared terms."""
    tf1 = Counter(d1.terms)
    tf2 = Counter(d2.terms)
    len1, len2 = len(d1.terms), len(d2.terms)
    score = 0.0
    for term in sorted(tf1.keys() & tf2.keys()):
        idf = _bm25_idf(stats, term)
        w1 = idf * _bm25_weight(tf1[term], len1, stats, k1, b)
        w2 = idf * _bm25_weight(tf2[term], len2, stats, k1, b)
        score += w1 * w2
    return score


def _nbow(d: TermSequence) -> tuple[list[str], np.ndarray]:
    tf = Counter(d.terms)
    tokens = sorted(tf)
    mass = np.array([tf[t] for t in tokens], dtype=np.float64)
    return tokens, mass / mass.sum()


def wmd_distance(d1: TermSequence, d2: TermSequence, emb: EmbeddingTable) -> float:
    """Exact word mover's distance between normalized bag-of-words masses.

    Ground cost is the Euclidean distance between word vectors; the
    transportation problem is solved exactly as a linear program. Use the
    negated value as a ranking similarity.
    """
    if not d1.terms or not d2.terms:
        raise EmptySequence("word mover's distance needs non-empty documents")
    tok1, a = _nbow(d1)
    tok2, b = _nbow(d2)
    if len(tok1) > WMD_MAX_DISTINCT or len(tok2) > WMD_MAX_DISTINCT:
        raise ValueError(f"more than {WMD_MAX_DISTINCT} distinct tokens per side")
    v1 = emb.vectors[emb.indices(tok1)]
    v2 = emb.vectors[emb.indices(tok2)]
    diff = v1[:, None, :] - v2[None, :, :]
    cost = np.sqrt((diff * diff).sum(axis=2))

    m, n = cost.shape
    # flow variables x[i, j] flattened row-major
    a_eq = np.zeros((m + n, m * n))
    for i in range(m):
        a_eq[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([a, b])
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise SolverFailure(f"transport LP failed: {res.message}")
    return float(res.fun)
