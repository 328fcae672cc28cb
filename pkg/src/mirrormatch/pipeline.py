"""Shared orchestration used by the CLI and the HTTP service.

Turns raw corpus files into per-topic scoring contexts: preprocess candidate
documents, train (or load) the topic's embedding table, filter sequences to
the table vocabulary, and build collection statistics. Trained tables are
cached on disk keyed by a hash of the training inputs and parameters, so a
corpus is embedded once per configuration.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import (
    Document,
    Ingest,
    SRTopic,
    TermSequence,
    default_stopwords,
    ingest_corpus,
    load_stopwords,
    preprocess,
)
from .embeddings import (
    EmbeddingParams,
    EmbeddingTable,
    load_embeddings,
    save_embeddings,
    train_sgns,
)
from .errors import EmptyDocument, MirrorMatchError
from .matching import MatchParams
from .scorers import (
    EMBEDDING_SCORERS,
    BaselineParams,
    PairScorer,
    TopicContext,
    make_scorer,
)


@dataclass
class TopicBundle:
    """One review topic ready for scoring."""

    topic: SRTopic
    documents: dict[str, Document]
    ctx: TopicContext
    skipped_docs: list[str] = field(default_factory=list)

    @property
    def sr_id(self) -> str:
        return self.topic.sr_id


def preprocess_topic(ingest: Ingest, sr_id: str,
                     stopwords: set[str]) -> tuple[dict[str, TermSequence], list[str]]:
    """Preprocess a topic's candidates; returns sequences and skipped doc ids."""
    topic = ingest.topics[sr_id]
    sequences: dict[str, TermSequence] = {}
    skipped: list[str] = []
    for doc_id in sorted(topic.candidates):
        try:
            sequences[doc_id] = preprocess(ingest.documents[doc_id], stopwords)
        except EmptyDocument:
            skipped.append(doc_id)
    return sequences, skipped


def _filter_to_vocab(sequences: dict[str, TermSequence],
                     vocab: set[str]) -> tuple[dict[str, TermSequence], list[str]]:
    kept: dict[str, TermSequence] = {}
    dropped: list[str] = []
    for doc_id, seq in sequences.items():
        terms = tuple(t for t in seq.terms if t in vocab)
        if terms:
            kept[doc_id] = TermSequence(doc_id=doc_id, terms=terms)
        else:
            dropped.append(doc_id)
    return kept, dropped


def _training_digest(sequences: dict[str, TermSequence], params: EmbeddingParams) -> str:
    payload = json.dumps(
        {
            "sequences": [[d, list(sequences[d].terms)] for d in sorted(sequences)],
            "params": [params.dim, params.window, params.min_count,
                       params.negative_samples, params.epochs,
                       params.learning_rate, params.rng_seed],
        },
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def train_topic_embeddings(sequences: dict[str, TermSequence], params: EmbeddingParams,
                           cache_dir: str | Path | None = None,
                           sr_id: str = "") -> EmbeddingTable:
    """Train a topic's table, reusing a disk cache when one matches."""
    if cache_dir is None:
        return train_sgns(sequences.values(), params)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    cache_file = cache_dir / f"{sr_id or 'topic'}-{_training_digest(sequences, params)}.vec"
    if cache_file.exists():
        return load_embeddings(cache_file)
    table = train_sgns(sequences.values(), params)
    tmp = cache_file.with_suffix(".tmp")
    save_embeddings(table, tmp)
    tmp.replace(cache_file)
    return table


def resolve_embedding_source(source: str | Path, sr_id: str) -> Path | None:
    """Map an --embeddings value to a concrete file for one topic.

    "train" means train locally (returns None); a directory means
    "<dir>/<sr_id>.vec"; anything else is used as a single shared file.
    """
    if str(source) == "train":
        return None
    path = Path(source)
    if path.is_dir():
        return path / f"{sr_id}.vec"
    return path


def build_topic_bundle(ingest: Ingest, sr_id: str, stopwords: set[str],
                       emb_source: str | Path | None,
                       emb_params: EmbeddingParams | None = None,
                       cache_dir: str | Path | None = None) -> TopicBundle:
    """Prepare one topic end to end.

    With an embedding source ("train" or a file/directory of word2vec text
    files) the sequences are filtered to the table vocabulary; without one,
    lexical scorers run over unfiltered sequences.
    """
    topic = ingest.topics[sr_id]
    sequences, skipped = preprocess_topic(ingest, sr_id, stopwords)
    if not sequences:
        raise MirrorMatchError(f"topic {sr_id}: every candidate is empty after preprocessing")

    emb: EmbeddingTable | None = None
    if emb_source is not None:
        path = resolve_embedding_source(emb_source, sr_id)
        if path is None:
            emb = train_topic_embeddings(sequences, emb_params or EmbeddingParams(),
                                         cache_dir=cache_dir, sr_id=sr_id)
        else:
            emb = load_embeddings(path)
        sequences, dropped = _filter_to_vocab(sequences, set(emb.vocab))
        skipped = skipped + dropped
        if not sequences:
            raise MirrorMatchError(
                f"topic {sr_id}: no candidate retains in-vocabulary tokens"
            )

    live = frozenset(sequences)
    live_topic = SRTopic(
        sr_id=topic.sr_id,
        candidates=live,
        qrels={d: r for d, r in topic.qrels.items() if d in live},
    )
    ctx = TopicContext.build(live_topic, sequences, emb)
    docs = {d: ingest.documents[d] for d in live}
    return TopicBundle(topic=live_topic, documents=docs, ctx=ctx, skipped_docs=skipped)


@dataclass
class RunConfig:
    """Validated inputs for a ranking / evaluation / simulation run."""

    corpus_path: Path
    topics_path: Path
    qrels_path: Path | None = None
    model: str = "mmatch"
    match_params: MatchParams = field(default_factory=MatchParams)
    baseline_params: BaselineParams = field(default_factory=BaselineParams)
    emb_source: str | None = None  # "train" | path | None
    emb_params: EmbeddingParams = field(default_factory=EmbeddingParams)
    ks: tuple[int, ...] = (10, 20, 30)
    cache_dir: Path | None = None
    stopwords_path: Path | None = None

    def load(self) -> Ingest:
        return ingest_corpus(self.corpus_path, self.topics_path, self.qrels_path)

    def stopwords(self) -> set[str]:
        if self.stopwords_path is not None:
            return load_stopwords(self.stopwords_path)
        return default_stopwords()

    def needs_embeddings(self) -> bool:
        return self.model in EMBEDDING_SCORERS

    def bundle(self, ingest: Ingest, sr_id: str, stopwords: set[str]) -> TopicBundle:
        source = self.emb_source
        if source is None and self.needs_embeddings():
            source = "train"
        return build_topic_bundle(ingest, sr_id, stopwords, source,
                                  self.emb_params, self.cache_dir)

    def scorer(self, bundle: TopicBundle) -> PairScorer:
        return make_scorer(self.model, bundle.ctx,
                           match_params=self.match_params,
                           baseline_params=self.baseline_params)
