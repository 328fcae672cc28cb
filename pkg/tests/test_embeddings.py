"""Embedding table, cosine, IO round trips, and the SGNS trainer."""

import numpy as np
import pytest

from mirrormatch.corpus import TermSequence
from mirrormatch.embeddings import (
    EmbeddingParams,
    EmbeddingTable,
    cosine,
    load_embeddings,
    save_embeddings,
    train_sgns,
)
from mirrormatch.errors import (
    DimensionMismatch,
    EmptyVocabulary,
    HeaderMismatch,
    MalformedVector,
    MissingEmbedding,
)


class TestCosine:
    def test_identity(self):
        v = np.array([0.3, -1.2, 4.0])
        assert cosine(v, v) == 1.0

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_hand_value(self):
        got = cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        assert got == pytest.approx(0.7071067811865475, abs=1e-9)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            u = rng.normal(size=6)
            v = rng.normal(size=6)
            assert cosine(u, v) == cosine(v, u)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            u = rng.normal(size=5)
            v = rng.normal(size=5)
            alpha = float(rng.uniform(0.1, 50.0))
            assert cosine(alpha * u, v) == pytest.approx(cosine(u, v), abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cosine(np.ones(3), np.ones(4))

    def test_zero_vector_neutral(self):
        assert cosine(np.zeros(3), np.ones(3)) == 0.0


class TestTable:
    def test_lookup_and_missing(self):
        table = EmbeddingTable.from_mapping({"a": np.ones(3), "b": np.zeros(3)})
        assert table.vector("a").tolist() == [1.0, 1.0, 1.0]
        with pytest.raises(MissingEmbedding):
            table.vector("zebra")

    def test_immutable_vectors(self):
        table = EmbeddingTable.from_mapping({"a": np.ones(3)})
        with pytest.raises(ValueError):
            table.vectors[0, 0] = 5.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            EmbeddingTable.from_mapping({"a": np.array([1.0, np.inf])})

    def test_rejects_non_bijective_vocab(self):
        from mirrormatch.embeddings import EmbeddingParams

        params = EmbeddingParams(dim=2, window=1, min_count=1)
        with pytest.raises(ValueError):
            EmbeddingTable({"a": 0, "b": 2}, np.ones((2, 2)), params)

    def test_unit_matrix_preserves_zero_rows(self):
        table = EmbeddingTable.from_mapping({"a": np.zeros(3), "b": 2 * np.ones(3)})
        unit = table.unit_matrix()
        assert np.all(unit[table.vocab["a"]] == 0.0)
        assert np.linalg.norm(unit[table.vocab["b"]]) == pytest.approx(1.0, abs=1e-12)


class TestTextIO:
    def test_round_trip_lossless(self, tmp_path):
        rng = np.random.default_rng(1)
        table = EmbeddingTable.from_mapping({f"w{i}": rng.normal(size=7) for i in range(9)})
        path = tmp_path / "emb.vec"
        save_embeddings(table, path)
        loaded = load_embeddings(path)
        assert loaded.vocab == table.vocab
        assert np.array_equal(loaded.vectors, table.vectors)

    def test_small_file(self, tmp_path):
        path = tmp_path / "emb.vec"
        path.write_text("2 3\nx 1.0 2.0 3.0\ny 0.5 0.25 -1.0\n")
        table = load_embeddings(path)
        assert len(table) == 2 and table.dim == 3

    def test_header_mismatch(self, tmp_path):
        path = tmp_path / "emb.vec"
        path.write_text("2 3\nx 1.0 2.0 3.0\n")
        with pytest.raises(HeaderMismatch):
            load_embeddings(path)

    def test_malformed_vector_count(self, tmp_path):
        path = tmp_path / "emb.vec"
        path.write_text("1 3\nx 1.0 2.0\n")
        with pytest.raises(MalformedVector):
            load_embeddings(path)

    def test_malformed_vector_non_numeric(self, tmp_path):
        path = tmp_path / "emb.vec"
        path.write_text("1 3\nx 1.0 two 3.0\n")
        with pytest.raises(MalformedVector):
            load_embeddings(path)


def _cluster_corpus(rng: np.random.Generator, n_sentences: int,
                    rare_token: str | None = None) -> list[TermSequence]:
    """Two disjoint co-occurrence clusters; optionally inject a 4x rare token."""
    a = [f"a{i}" for i in range(6)]
    b = [f"b{i}" for i in range(6)]
    seqs = []
    for s in range(n_sentences):
        pool = a if rng.random() < 0.5 else b
        terms = [pool[int(i)] for i in rng.integers(0, len(pool), size=5)]
        seqs.append(TermSequence(doc_id=f"s{s}", terms=tuple(terms)))
    if rare_token is not None:
        for k in range(4):
            seqs.append(TermSequence(doc_id=f"rare{k}", terms=(a[0], rare_token, a[1])))
    return seqs


SMALL = dict(dim=16, window=3, min_count=5, epochs=5)


class TestTrainer:
    def test_min_count_excludes_rare_tokens(self):
        rng = np.random.default_rng(0)
        seqs = _cluster_corpus(rng, 120, rare_token="unicorn")
        table = train_sgns(seqs, EmbeddingParams(rng_seed=1, **SMALL))
        assert "unicorn" not in table
        assert all(t in table for t in ("a0", "b0"))

    def test_default_dim_is_300(self):
        seqs = [TermSequence(doc_id="s", terms=("x", "y") * 4) for _ in range(5)]
        table = train_sgns(seqs, EmbeddingParams(min_count=5, rng_seed=3))
        assert table.dim == 300
        assert table.vector("x").shape == (300,)

    def test_empty_vocabulary(self):
        seqs = [TermSequence(doc_id="s", terms=("x",))] * 4
        with pytest.raises(EmptyVocabulary):
            train_sgns(seqs, EmbeddingParams(min_count=5, dim=4))

    def test_seeded_runs_bit_identical(self):
        rng = np.random.default_rng(4)
        seqs = _cluster_corpus(rng, 80)
        p = EmbeddingParams(rng_seed=99, **SMALL)
        t1 = train_sgns(seqs, p)
        t2 = train_sgns(seqs, p)
        assert t1.vocab == t2.vocab
        assert np.array_equal(t1.vectors, t2.vectors)
        assert t1.epoch_losses == t2.epoch_losses

    def test_loss_decreases_over_epochs(self):
        rng = np.random.default_rng(8)
        seqs = _cluster_corpus(rng, 150)
        table = train_sgns(seqs, EmbeddingParams(rng_seed=5, **SMALL))
        assert table.epoch_losses[-1] <= table.epoch_losses[0]

    def test_cluster_separation_single_seed(self):
        rng = np.random.default_rng(9)
        seqs = _cluster_corpus(rng, 250)
        table = train_sgns(seqs, EmbeddingParams(rng_seed=21, **SMALL))
        within = cosine(table.vector("a0"), table.vector("a1"))
        cross = cosine(table.vector("a0"), table.vector("b1"))
        assert within > cross
