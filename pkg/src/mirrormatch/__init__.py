"""Seed-driven screening prioritization for systematic reviews."""

from .corpus import Document, SRTopic, TermSequence, preprocess
from .embeddings import EmbeddingParams, EmbeddingTable, cosine, train_sgns
from .matching import MatchParams, MatchScore, matching_position, mirror_match, one_way_score
from .scorers import SCORER_NAMES, BaselineParams, TopicContext, make_scorer

__version__ = "0.1.0"

__all__ = [
    "Document",
    "SRTopic",
    "TermSequence",
    "preprocess",
    "EmbeddingParams",
    "EmbeddingTable",
    "cosine",
    "train_sgns",
    "MatchParams",
    "MatchScore",
    "matching_position",
    "mirror_match",
    "one_way_score",
    "SCORER_NAMES",
    "BaselineParams",
    "TopicContext",
    "make_scorer",
    "__version__",
]
