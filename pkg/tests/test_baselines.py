"""Baseline scorers against direct-formula references and a transport-plan
enumeration oracle for word mover's distance."""

import math
from collections import Counter

import numpy as np
import pytest

from mirrormatch.baselines import (
    CollectionStats,
    avgemb_cosine,
    bm25_score,
    ok_sim,
    ql_jm_score,
    tf_inner,
    tfidf_cosine,
    wmd_distance,
)
from mirrormatch.corpus import TermSequence
from mirrormatch.embeddings import cosine

from conftest import random_sequence, random_table


def ref_bm25(q, d, stats, k1=1.5, b=0.75):
    """Direct restatement of the scoring formula."""
    tf = Counter(d.terms)
    score = 0.0
    for t in sorted(set(q.terms)):
        f = tf[t]
        if f == 0:
            continue
        df = stats.doc_freq.get(t, 0)
        idf = math.log((stats.doc_count - df + 0.5) / (df + 0.5) + 1.0)
        score += idf * (f * (k1 + 1)) / (f + k1 * (1 - b + b * len(d.terms) / stats.avg_doc_len))
    return score


def ref_ql(q, d, stats, lam=0.2):
    tf = Counter(d.terms)
    out = 0.0
    for t in q.terms:
        out += math.log((1 - lam) * tf[t] / len(d.terms)
                        + lam * stats.coll_term_freq[t] / stats.total_terms)
    return out


def ref_tfidf_cosine(d1, d2, stats):
    """Dense-vector reference over the full shared vocabulary."""
    vocab = sorted(set(d1.terms) | set(d2.terms))
    def vec(d):
        tf = Counter(d.terms)
        return np.array([tf[t] * math.log(stats.doc_count / stats.doc_freq[t])
                         for t in vocab])
    u, v = vec(d1), vec(d2)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def ref_tf_inner(d1, d2):
    t1, t2 = Counter(d1.terms), Counter(d2.terms)
    return sum(t1[t] * t2[t] for t in set(t1) | set(t2))


def ref_ok(d1, d2, stats, k1=1.5, b=0.75):
    t1, t2 = Counter(d1.terms), Counter(d2.terms)
    def w(tf, dlen, t):
        df = stats.doc_freq.get(t, 0)
        idf = math.log((stats.doc_count - df + 0.5) / (df + 0.5) + 1.0)
        return idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dlen / stats.avg_doc_len))
    return sum(w(t1[t], len(d1.terms), t) * w(t2[t], len(d2.terms), t)
               for t in set(t1) & set(t2))


def wmd_oracle(d1, d2, emb):
    """Exhaustive enumeration of integer transport plans.

    With both marginals scaled by lcm(|d1|, |d2|) the transportation
    polytope has integral vertices, so the optimum is attained on an
    integer plan; enumerating all of them (with cost pruning) is exact.
    """
    tf1, tf2 = Counter(d1.terms), Counter(d2.terms)
    tok1, tok2 = sorted(tf1), sorted(tf2)
    n1, n2 = len(d1.terms), len(d2.terms)
    scale = math.lcm(n1, n2)
    a = [tf1[t] * scale // n1 for t in tok1]
    b = [tf2[t] * scale // n2 for t in tok2]
    cost = [[float(np.linalg.norm(emb.vector(x) - emb.vector(y))) for y in tok2]
            for x in tok1]
    best = [math.inf]
    m, n = len(a), len(b)

    def fill_row(i, cols, acc):
        if acc >= best[0]:
            return
        if i == m:
            best[0] = acc
            return
        row_total = a[i]

        def cell(j, left, acc_row):
            if acc_row >= best[0]:
                return
            if j == n - 1:
                if left <= cols[j]:
                    cols[j] -= left
                    fill_row(i + 1, cols, acc_row + left * cost[i][j])
                    cols[j] += left
                return
            for x in range(min(left, cols[j]) + 1):
                cols[j] -= x
                cell(j + 1, left - x, acc_row + x * cost[i][j])
                cols[j] += x

        cell(0, row_total, acc)

    fill_row(0, list(b), 0.0)
    return best[0] / scale


@pytest.fixture(scope="module")
def table():
    return random_table(np.random.default_rng(77), n_tokens=12, dim=6)


def _random_docs(rng, n_tokens=12, max_len=12):
    d1 = random_sequence(rng, "d1", int(rng.integers(1, max_len)), n_tokens=n_tokens)
    d2 = random_sequence(rng, "d2", int(rng.integers(1, max_len)), n_tokens=n_tokens)
    others = [random_sequence(rng, f"x{i}", int(rng.integers(1, max_len)),
                              n_tokens=n_tokens) for i in range(4)]
    stats = CollectionStats.from_sequences([d1, d2, *others])
    return d1, d2, stats


class TestBM25:
    def test_absent_term_contributes_zero(self):
        d = TermSequence("d", ("x", "y"))
        q1 = TermSequence("q", ("x",))
        q2 = TermSequence("q", ("x", "zzz"))
        stats = CollectionStats.from_sequences([d, TermSequence("e", ("zzz",))])
        assert bm25_score(q1, d, stats) == bm25_score(q2, d, stats)

    def test_hand_value_single_doc(self):
        d = TermSequence("d", ("x",))
        stats = CollectionStats.from_sequences([d])
        got = bm25_score(TermSequence("q", ("x",)), d, stats, k1=1.5, b=0.75)
        assert got == pytest.approx(0.28768, abs=1e-5)

    def test_rarer_term_scores_higher(self):
        docs = [TermSequence("a", ("rare", "pad")), TermSequence("b", ("common", "pad")),
                TermSequence("c", ("common", "pad"))]
        stats = CollectionStats.from_sequences(docs)
        rare = bm25_score(TermSequence("q", ("rare",)), docs[0], stats)
        common = bm25_score(TermSequence("q", ("common",)), docs[1], stats)
        assert rare > common

    def test_matches_reference(self, rng):
        for _ in range(60):
            d1, d2, stats = _random_docs(rng)
            assert bm25_score(d1, d2, stats) == pytest.approx(
                ref_bm25(d1, d2, stats), abs=1e-12)

    def test_asymmetric(self):
        d1 = TermSequence("a", ("x", "x", "y"))
        d2 = TermSequence("b", ("x", "z", "z", "z"))
        stats = CollectionStats.from_sequences([d1, d2])
        assert bm25_score(d1, d2, stats) != bm25_score(d2, d1, stats)


class TestQL:
    def test_identity_singleton_collection_is_zero(self):
        d = TermSequence("d", ("x",))
        stats = CollectionStats.from_sequences([d])
        assert ql_jm_score(TermSequence("q", ("x",)), d, stats, 0.2) == 0.0

    def test_absent_term_uses_collection_model(self):
        d1 = TermSequence("a", ("x", "x"))
        d2 = TermSequence("b", ("y", "y"))
        stats = CollectionStats.from_sequences([d1, d2])
        got = ql_jm_score(TermSequence("q", ("y",)), d1, stats, 0.2)
        assert got == pytest.approx(math.log(0.2 * 2 / 4), abs=1e-12)

    def test_matches_reference(self, rng):
        for _ in range(60):
            d1, d2, stats = _random_docs(rng)
            assert ql_jm_score(d1, d2, stats) == pytest.approx(
                ref_ql(d1, d2, stats), abs=1e-12)

    def test_term_with_zero_probability_everywhere(self):
        d = TermSequence("d", ("x",))
        stats = CollectionStats.from_sequences([d])
        from mirrormatch.errors import UndefinedLog
        with pytest.raises(UndefinedLog):
            ql_jm_score(TermSequence("q", ("never-seen",)), d, stats)

    def test_ranking_invariant_to_duplicating_collection(self, rng):
        docs = [random_sequence(rng, f"d{i}", 6, n_tokens=8) for i in range(6)]
        stats1 = CollectionStats.from_sequences(docs)
        stats2 = CollectionStats.from_sequences(docs + docs)
        q = docs[0]
        s1 = [ql_jm_score(q, d, stats1) for d in docs[1:]]
        s2 = [ql_jm_score(q, d, stats2) for d in docs[1:]]
        assert np.argsort(s1).tolist() == np.argsort(s2).tolist()


class TestTfidf:
    def test_identity(self, rng):
        d1, _, stats = _random_docs(rng)
        assert tfidf_cosine(d1, d1, stats) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_vocab_is_zero(self):
        a = TermSequence("a", ("x", "y"))
        b = TermSequence("b", ("u", "w"))
        stats = CollectionStats.from_sequences([a, b, TermSequence("c", ("x", "u"))])
        assert tfidf_cosine(a, b, stats) == 0.0

    def test_matches_reference(self, rng):
        for _ in range(60):
            d1, d2, stats = _random_docs(rng)
            assert tfidf_cosine(d1, d2, stats) == pytest.approx(
                ref_tfidf_cosine(d1, d2, stats), abs=1e-12)

    def test_symmetric(self, rng):
        for _ in range(30):
            d1, d2, stats = _random_docs(rng)
            assert tfidf_cosine(d1, d2, stats) == tfidf_cosine(d2, d1, stats)


class TestAvgEmb:
    def test_identity(self, table, rng):
        d = random_sequence(rng, "d", 8, n_tokens=12)
        assert avgemb_cosine(d, d, table) == 1.0

    def test_single_terms_reduce_to_word_cosine(self, table):
        a = TermSequence("a", ("t0",))
        b = TermSequence("b", ("t5",))
        assert avgemb_cosine(a, b, table) == pytest.approx(
            cosine(table.vector("t0"), table.vector("t5")), abs=1e-12)

    def test_matches_mean_then_cosine_reference(self, table, rng):
        for _ in range(40):
            d1 = random_sequence(rng, "d1", int(rng.integers(1, 10)), n_tokens=12)
            d2 = random_sequence(rng, "d2", int(rng.integers(1, 10)), n_tokens=12)
            m1 = np.mean([table.vector(t) for t in d1.terms], axis=0)
            m2 = np.mean([table.vector(t) for t in d2.terms], axis=0)
            expected = float(np.dot(m1, m2) / (np.linalg.norm(m1) * np.linalg.norm(m2)))
            assert avgemb_cosine(d1, d2, table) == pytest.approx(expected, abs=1e-12)


class TestTfInner:
    def test_disjoint_vocab(self):
        assert tf_inner(TermSequence("a", ("x",)), TermSequence("b", ("y",))) == 0.0

    def test_hand_count(self):
        d = TermSequence("d", ("x", "x", "y"))
        assert tf_inner(d, d) == 5.0

    def test_matches_reference(self, rng):
        for _ in range(60):
            d1, d2, _ = _random_docs(rng)
            assert tf_inner(d1, d2) == ref_tf_inner(d1, d2)

    def test_symmetric(self, rng):
        for _ in range(30):
            d1, d2, _ = _random_docs(rng)
            assert tf_inner(d1, d2) == tf_inner(d2, d1)


class TestOK:
    def test_disjoint_vocab(self):
        a = TermSequence("a", ("x",))
        b = TermSequence("b", ("y",))
        stats = CollectionStats.from_sequences([a, b])
        assert ok_sim(a, b, stats) == 0.0

    def test_symmetric(self, rng):
        for _ in range(30):
            d1, d2, stats = _random_docs(rng)
            assert ok_sim(d1, d2, stats) == ok_sim(d2, d1, stats)

    def test_matches_reference(self, rng):
        for _ in range(60):
            d1, d2, stats = _random_docs(rng)
            assert ok_sim(d1, d2, stats) == pytest.approx(
                ref_ok(d1, d2, stats), abs=1e-12)


def _small_doc(rng, doc_id, n_tokens=5, max_len=6):
    length = int(rng.integers(1, max_len))
    return random_sequence(rng, doc_id, length, n_tokens=n_tokens)


class TestWMD:
    def test_identity_zero(self, table, rng):
        for _ in range(10):
            d = _small_doc(rng, "d")
            assert wmd_distance(d, d, table) == pytest.approx(0.0, abs=1e-10)

    def test_same_nbow_zero(self, table):
        d1 = TermSequence("a", ("t0", "t1"))
        d2 = TermSequence("b", ("t0", "t0", "t1", "t1"))
        assert wmd_distance(d1, d2, table) == pytest.approx(0.0, abs=1e-10)

    def test_single_words_reduce_to_euclidean(self, table):
        d1 = TermSequence("a", ("t0",))
        d2 = TermSequence("b", ("t7",))
        expected = float(np.linalg.norm(table.vector("t0") - table.vector("t7")))
        assert wmd_distance(d1, d2, table) == pytest.approx(expected, abs=1e-10)

    def test_symmetry_and_nonnegativity(self, table, rng):
        for _ in range(25):
            d1 = _small_doc(rng, "d1", n_tokens=12, max_len=8)
            d2 = _small_doc(rng, "d2", n_tokens=12, max_len=8)
            a = wmd_distance(d1, d2, table)
            b = wmd_distance(d2, d1, table)
            assert a >= 0.0
            assert a == pytest.approx(b, abs=1e-10)

    def test_matches_enumeration_oracle(self, table, rng):
        for _ in range(20):
            d1 = _small_doc(rng, "d1")
            d2 = _small_doc(rng, "d2")
            got = wmd_distance(d1, d2, table)
            want = wmd_oracle(d1, d2, table)
            assert got == pytest.approx(want, abs=1e-8)
