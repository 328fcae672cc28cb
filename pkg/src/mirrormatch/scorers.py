"""Registry binding scorer names to pair-scoring callables for one topic.

A scorer is ``score(query_doc_id, candidate_doc_id) -> float`` over the
topic's preprocessed sequences, so ranking and simulation code stays
model-agnostic. Higher is better for every scorer (distances are negated).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import baselines
from .baselines import CollectionStats
from .corpus import SRTopic, TermSequence
from .embeddings import EmbeddingTable
from .errors import UnknownModel
from .matching import MatchParams, mirror_match

PairScorer = Callable[[str, str], float]

SCORER_NAMES = ("bm25", "ql", "tfidf", "avgemb", "tfinner", "ok", "wmd", "mmatch")

EMBEDDING_SCORERS = frozenset({"avgemb", "wmd", "mmatch"})


@dataclass(frozen=True)
class BaselineParams:
    """Knobs for the non-matching scorers."""

    k1: float = 1.5
    b: float = 0.75
    ql_lambda: float = 0.2


@dataclass
class TopicContext:
    """Everything needed to score pairs within one review topic."""

    topic: SRTopic
    sequences: dict[str, TermSequence]
    stats: CollectionStats
    emb: EmbeddingTable | None = None

    @classmethod
    def build(cls, topic: SRTopic, sequences: dict[str, TermSequence],
              emb: EmbeddingTable | None = None) -> "TopicContext":
        stats = CollectionStats.from_sequences(sequences.values())
        return cls(topic=topic, sequences=sequences, stats=stats, emb=emb)

    def seq(self, doc_id: str) -> TermSequence:
        return self.sequences[doc_id]


def make_scorer(name: str, ctx: TopicContext,
                match_params: MatchParams | None = None,
                baseline_params: BaselineParams | None = None) -> PairScorer:
    """Build a pair scorer; raises :class:`UnknownModel` for unknown names."""
    if name not in SCORER_NAMES:
        raise UnknownModel(name, list(SCORER_NAMES))
    if name in EMBEDDING_SCORERS and ctx.emb is None:
        raise ValueError(f"scorer {name!r} needs an embedding table")
    mp = match_params or MatchParams()
    bp = baseline_params or BaselineParams()

    if name == "bm25":
        return lambda q, d: baselines.bm25_score(ctx.seq(q), ctx.seq(d), ctx.stats, bp.k1, bp.b)
    if name == "ql":
        return lambda q, d: baselines.ql_jm_score(ctx.seq(q), ctx.seq(d), ctx.stats, bp.ql_lambda)
    if name == "tfidf":
        return lambda q, d: baselines.tfidf_cosine(ctx.seq(q), ctx.seq(d), ctx.stats)
    if name == "avgemb":
        return lambda q, d: baselines.avgemb_cosine(ctx.seq(q), ctx.seq(d), ctx.emb)
    if name == "tfinner":
        return lambda q, d: baselines.tf_inner(ctx.seq(q), ctx.seq(d))
    if name == "ok":
        return lambda q, d: baselines.ok_sim(ctx.seq(q), ctx.seq(d), ctx.stats, bp.k1, bp.b)
    if name == "wmd":
        return lambda q, d: -baselines.wmd_distance(ctx.seq(q), ctx.seq(d), ctx.emb)
    return lambda q, d: mirror_match(ctx.seq(q), ctx.seq(d), mp, ctx.emb).total
