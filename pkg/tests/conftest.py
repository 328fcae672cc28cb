"""Shared test fixtures: random sequences and synthetic embedding tables."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from mirrormatch.corpus import TermSequence
from mirrormatch.embeddings import EmbeddingTable

TOY_DIR = Path(__file__).resolve().parent.parent / "src" / "mirrormatch" / "data" / "toy"


def random_table(rng: np.random.Generator, n_tokens: int = 40, dim: int = 16) -> EmbeddingTable:
    """Embedding table over tokens t0..t{n-1} with standard-normal vectors."""
    return EmbeddingTable.from_mapping(
        {f"t{i}": rng.normal(size=dim) for i in range(n_tokens)}
    )


def random_sequence(rng: np.random.Generator, doc_id: str, length: int,
                    n_tokens: int = 40) -> TermSequence:
    terms = tuple(f"t{int(i)}" for i in rng.integers(0, n_tokens, size=length))
    return TermSequence(doc_id=doc_id, terms=terms)


@pytest.fixture(scope="session")
def shared_table() -> EmbeddingTable:
    return random_table(np.random.default_rng(2024))


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(7)
