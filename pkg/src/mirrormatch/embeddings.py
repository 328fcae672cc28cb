"""Local word embeddings: a skip-gram negative-sampling trainer plus lookups.

Each review topic gets its own table trained on its candidate documents;
tables are never mixed across topics. Training is single-threaded and fully
seeded, so runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from .corpus import TermSequence
from .errors import (
    DimensionMismatch,
    EmptyVocabulary,
    HeaderMismatch,
    MalformedVector,
    MissingEmbedding,
    ParseError,
)


@dataclass(frozen=True)
class EmbeddingParams:
    """Training hyperparameters (or those declared by a loaded file)."""

    dim: int = 300
    window: int = 7
    min_count: int = 5
    negative_samples: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    rng_seed: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.min_count < 1:
            raise ValueError("dim, window, and min_count must all be >= 1")


class EmbeddingTable:
    """Immutable vocabulary -> dense-vector map.

    Raw vectors are stored as loaded/trained; a unit-normalized copy is built
    lazily for scoring hot loops and never changes observable results.
    """

    def __init__(self, vocab: dict[str, int], vectors: np.ndarray, params: EmbeddingParams):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D matrix")
        if len(vocab) != vectors.shape[0]:
            raise ValueError("vocab size and vector row count differ")
        if sorted(vocab.values()) != list(range(len(vocab))):
            raise ValueError("vocab indices must be a bijection onto 0..n-1")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors must be finite")
        self._vocab = dict(vocab)
        self._vectors = vectors
        self._vectors.setflags(write=False)
        self._params = params
        self._unit: np.ndarray | None = None
        self.epoch_losses: tuple[float, ...] = ()

    @classmethod
    def from_mapping(cls, mapping: dict[str, np.ndarray],
                     params: EmbeddingParams | None = None) -> "EmbeddingTable":
        tokens = list(mapping)
        vectors = np.asarray([mapping[t] for t in tokens], dtype=np.float64)
        dim = vectors.shape[1] if vectors.size else 0
        params = params or EmbeddingParams(dim=max(dim, 1), window=1, min_count=1)
        return cls({t: i for i, t in enumerate(tokens)}, vectors, params)

    @property
    def dim(self) -> int:
        return self._vectors.shape[1]

    @property
    def params(self) -> EmbeddingParams:
        return self._params

    @property
    def vocab(self) -> dict[str, int]:
        return dict(self._vocab)

    @property
    def vectors(self) -> np.ndarray:
        return self._vectors

    def __len__(self) -> int:
        return len(self._vocab)

    def __contains__(self, token: str) -> bool:
        return token in self._vocab

    def vector(self, token: str) -> np.ndarray:
        try:
            return self._vectors[self._vocab[token]]
        except KeyError:
            raise MissingEmbedding(f"no vector for token {token!r}") from None

    def indices(self, tokens) -> np.ndarray:
        try:
            return np.array([self._vocab[t] for t in tokens], dtype=np.intp)
        except KeyError as exc:
            raise MissingEmbedding(f"no vector for token {exc.args[0]!r}") from None

    def unit_matrix(self) -> np.ndarray:
        """Row-normalized vectors; all-zero rows stay zero."""
        if self._unit is None:
            norms = np.linalg.norm(self._vectors, axis=1, keepdims=True)
            safe = np.where(norms > 0.0, norms, 1.0)
            unit = self._vectors / safe
            unit.setflags(write=False)
            self._unit = unit
        return self._unit


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; all-zero vectors yield 0.0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"shapes {u.shape} and {v.shape} differ")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if np.array_equal(u, v):
        return 1.0
    return float(min(1.0, max(-1.0, float(np.dot(u, v)) / (nu * nv))))


# --- SGNS trainer ------------------------------------------------------------

@njit(cache=True)
def _sgns_epoch(w_in, w_out, centers, contexts, negatives, n_negative,
                lr_start, lr_min, lr_span, step0):
    """One pass of sequential per-pair SGD; returns summed pair loss."""
    dim = w_in.shape[1]
    n_pairs = centers.shape[0]
    total_loss = 0.0
    grad_h = np.empty(dim)
    for p in range(n_pairs):
        step = step0 + p
        lr = lr_start * (1.0 - step / lr_span)
        if lr < lr_min:
            lr = lr_min
        c = centers[p]
        h = w_in[c]
        for d in range(dim):
            grad_h[d] = 0.0
        for s in range(n_negative + 1):
            if s == 0:
                o = contexts[p]
                label = 1.0
            else:
                o = negatives[p, s - 1]
                label = 0.0
            x = 0.0
            for d in range(dim):
                x += h[d] * w_out[o, d]
            # stable softplus for the loss; exact sigmoid for the gradient
            if label == 1.0:
                z = -x
            else:
                z = x
            if z > 0.0:
                total_loss += z + np.log1p(np.exp(-z))
            else:
                total_loss += np.log1p(np.exp(z))
            f = 1.0 / (1.0 + np.exp(-x))
            g = (label - f) * lr
            for d in range(dim):
                grad_h[d] += g * w_out[o, d]
                w_out[o, d] += g * h[d]
        for d in range(dim):
            w_in[c, d] += grad_h[d]
    return total_loss


def _build_pairs(indexed: list[np.ndarray], window: int) -> tuple[np.ndarray, np.ndarray]:
    centers = []
    contexts = []
    for seq in indexed:
        n = len(seq)
        for i in range(n):
            lo = max(0, i - window)
            hi = min(n, i + window + 1)
            for j in range(lo, hi):
                if j != i:
                    centers.append(seq[i])
                    contexts.append(seq[j])
    return (np.array(centers, dtype=np.int64), np.array(contexts, dtype=np.int64))


def train_sgns(sequences, params: EmbeddingParams) -> EmbeddingTable:
    """Train skip-gram-with-negative-sampling embeddings over term sequences.

    The vocabulary is exactly the tokens with corpus frequency >= min_count;
    rarer tokens are dropped from the training stream. Negatives are drawn
    from the unigram distribution raised to the 3/4 power. The returned table
    carries per-epoch mean pair losses in ``epoch_losses``.
    """
    counts: dict[str, int] = {}
    term_lists = []
    for seq in sequences:
        terms = seq.terms if isinstance(seq, TermSequence) else tuple(seq)
        term_lists.append(terms)
        for t in terms:
            counts[t] = counts.get(t, 0) + 1
    kept = sorted((t for t, c in counts.items() if c >= params.min_count),
                  key=lambda t: (-counts[t], t))
    if not kept:
        raise EmptyVocabulary(f"no token occurs >= {params.min_count} times")
    vocab = {t: i for i, t in enumerate(kept)}

    indexed = []
    for terms in term_lists:
        idx = np.array([vocab[t] for t in terms if t in vocab], dtype=np.int64)
        if len(idx) >= 2:
            indexed.append(idx)
    centers, contexts = _build_pairs(indexed, params.window)
    n_pairs = len(centers)

    rng = np.random.default_rng(params.rng_seed)
    n_vocab = len(vocab)
    w_in = rng.uniform(-0.5 / params.dim, 0.5 / params.dim,
                       size=(n_vocab, params.dim)).astype(np.float64)
    w_out = np.zeros((n_vocab, params.dim), dtype=np.float64)

    freq = np.array([counts[t] for t in kept], dtype=np.float64)
    noise = freq ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    lr_span = max(1, n_pairs * params.epochs)
    lr_min = params.learning_rate * 1e-4
    epoch_losses = []
    for epoch in range(params.epochs):
        if n_pairs:
            draws = rng.random(size=(n_pairs, params.negative_samples))
            negatives = np.searchsorted(noise_cdf, draws).astype(np.int64)
            loss = _sgns_epoch(w_in, w_out, centers, contexts, negatives,
                               params.negative_samples, params.learning_rate,
                               lr_min, float(lr_span), epoch * n_pairs)
            denom = n_pairs * (params.negative_samples + 1)
            epoch_losses.append(loss / denom)
        else:
            epoch_losses.append(0.0)

    table = EmbeddingTable(vocab, w_in, params)
    table.epoch_losses = tuple(epoch_losses)
    return table


# --- word2vec text IO --------------------------------------------------------

def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    """Write word2vec text format: header "<vocab> <dim>", then one row per token.

    Components use shortest round-trip float formatting, so save/load is
    lossless.
    """
    path = Path(path)
    order = sorted(table.vocab.items(), key=lambda kv: kv[1])
    with path.open("w") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for token, idx in order:
            comps = " ".join(repr(float(x)) for x in table.vectors[idx])
            fh.write(f"{token} {comps}\n")


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Read word2vec text format; header and body must agree."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError("header must be '<vocab_size> <dim>'", str(path), 1)
        try:
            n_vocab, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError("header must hold two integers", str(path), 1) from None
        vocab: dict[str, int] = {}
        vectors = np.empty((n_vocab, dim), dtype=np.float64)
        row = 0
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            if row >= n_vocab:
                raise HeaderMismatch(f"{path}: more rows than declared ({n_vocab})")
            parts = line.split()
            if len(parts) != dim + 1:
                raise MalformedVector(
                    f"{path}:{lineno}: expected {dim} components, got {len(parts) - 1}"
                )
            token = parts[0]
            if token in vocab:
                raise ParseError(f"duplicate token {token!r}", str(path), lineno)
            try:
                vectors[row] = [float(x) for x in parts[1:]]
            except ValueError:
                raise MalformedVector(f"{path}:{lineno}: non-numeric component") from None
            vocab[token] = row
            row += 1
    if row != n_vocab:
        raise HeaderMismatch(f"{path}: declared {n_vocab} rows, found {row}")
    params = EmbeddingParams(dim=max(dim, 1), window=1, min_count=1)
    return EmbeddingTable(vocab, vectors, params)
