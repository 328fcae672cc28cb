"""In-memory registry plus file-backed persistence for the service.

Corpora are registered under content-derived ids, so re-registering the same
files after a restart reattaches existing sessions. Sessions persist as JSON
after every mutation; reloading restores the exact fused ranking from the
stored snapshot.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus import Ingest, default_stopwords, ingest_corpus, load_stopwords
from ..embeddings import EmbeddingParams
from ..errors import MirrorMatchError
from ..evaluation import RankedList, RankEntry
from ..matching import MatchParams
from ..pipeline import TopicBundle, build_topic_bundle
from ..scorers import BaselineParams, PairScorer, make_scorer
from ..screening import RoundRecord, Session, create_session


@dataclass
class PreloadSpec:
    """Corpus registered at service startup (mirrors POST /corpora)."""

    corpus_path: Path
    topics_path: Path
    qrels_path: Path | None
    emb_source: str
    emb_params: EmbeddingParams
    stopwords_path: Path | None = None


@dataclass
class ServiceConfig:
    data_dir: Path
    preload: PreloadSpec | None = None
    ui_dir: Path | None = None


@dataclass
class CorpusBundle:
    corpus_id: str
    ingest: Ingest
    bundles: dict[str, TopicBundle]
    emb_source: str


@dataclass
class SessionRuntime:
    """A session plus its service-side bookkeeping."""

    session: Session
    corpus_id: str
    pending: list[tuple[str, bool]] = field(default_factory=list)
    tokens: set[str] = field(default_factory=set)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def visible_labels(self) -> dict[str, bool]:
        merged = dict(self.session.labels)
        merged.update(dict(self.pending))
        return merged


def params_from_dict(params: dict) -> tuple[MatchParams, BaselineParams]:
    mp = MatchParams(
        window_frac=float(params.get("lambda", 0.35)),
        use_position=bool(params.get("use_position", True)),
        use_two_way=bool(params.get("use_two_way", True)),
    )
    bp = BaselineParams(
        k1=float(params.get("k1", 1.5)),
        b=float(params.get("b", 0.75)),
        ql_lambda=float(params.get("ql_lambda", 0.2)),
    )
    return mp, bp


def _corpus_digest(corpus_path: Path, topics_path: Path, qrels_path: Path | None,
                   emb_source: str, emb_params: EmbeddingParams) -> str:
    h = hashlib.sha256()
    h.update(corpus_path.read_bytes())
    h.update(topics_path.read_bytes())
    if qrels_path is not None:
        h.update(qrels_path.read_bytes())
    h.update(str(emb_source).encode())
    h.update(json.dumps([emb_params.dim, emb_params.window, emb_params.min_count,
                         emb_params.negative_samples, emb_params.epochs,
                         emb_params.learning_rate, emb_params.rng_seed]).encode())
    return h.hexdigest()[:12]


# --- session JSON --------------------------------------------------------------

def _ranking_to_json(ranked: RankedList) -> dict:
    return {
        "query_doc_id": ranked.query_doc_id,
        "entries": [[e.doc_id, e.score, e.rank] for e in ranked.entries],
    }


def _ranking_from_json(obj: dict) -> RankedList:
    return RankedList(
        query_doc_id=obj["query_doc_id"],
        entries=tuple(RankEntry(doc_id=d, score=s, rank=r) for d, s, r in obj["entries"]),
    )


def session_to_json(rt: SessionRuntime) -> dict:
    s = rt.session
    return {
        "session_id": s.session_id,
        "corpus_id": rt.corpus_id,
        "sr_id": s.sr_id,
        "model": s.model,
        "params": s.params,
        "candidates": sorted(s.candidates),
        "seed_ids": list(s.seed_ids),
        "labels": [[d, bool(v)] for d, v in ((d, s.labels[d]) for d in s.label_order)],
        "current": _ranking_to_json(s.current),
        "history": [
            {
                "round": r.round,
                "labels_added": [[d, bool(v)] for d, v in r.labels_added],
                "ranking": _ranking_to_json(r.ranking),
            }
            for r in s.history
        ],
        "pending": [[d, bool(v)] for d, v in rt.pending],
        "tokens": sorted(rt.tokens),
    }


def session_from_json(obj: dict) -> SessionRuntime:
    labels_ordered = [(d, bool(v)) for d, v in obj["labels"]]
    session = Session(
        session_id=obj["session_id"],
        sr_id=obj["sr_id"],
        model=obj["model"],
        params=dict(obj["params"]),
        candidates=frozenset(obj["candidates"]),
        seed_ids=list(obj["seed_ids"]),
        labels=dict(labels_ordered),
        label_order=[d for d, _ in labels_ordered],
        current=_ranking_from_json(obj["current"]),
        history=[
            RoundRecord(
                round=r["round"],
                ranking=_ranking_from_json(r["ranking"]),
                labels_added=[(d, bool(v)) for d, v in r["labels_added"]],
            )
            for r in obj["history"]
        ],
    )
    return SessionRuntime(
        session=session,
        corpus_id=obj["corpus_id"],
        pending=[(d, bool(v)) for d, v in obj.get("pending", [])],
        tokens=set(obj.get("tokens", [])),
    )


class ServiceState:
    """Holds registered corpora and live sessions."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.cache_dir = self.data_dir / "emb_cache"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.corpora: dict[str, CorpusBundle] = {}
        self.sessions: dict[str, SessionRuntime] = {}
        self._registry_lock = threading.Lock()

    # --- corpora ---------------------------------------------------------

    def register_corpus(self, corpus_path: Path, topics_path: Path,
                        qrels_path: Path | None, emb_source: str,
                        emb_params: EmbeddingParams,
                        stopwords_path: Path | None = None) -> tuple[CorpusBundle, bool]:
        """Ingest + embed; returns (bundle, created). Content-keyed, so
        registering the same inputs twice reuses the first bundle."""
        corpus_id = _corpus_digest(corpus_path, topics_path, qrels_path,
                                   emb_source, emb_params)
        with self._registry_lock:
            if corpus_id in self.corpora:
                return self.corpora[corpus_id], False
            ingest = ingest_corpus(corpus_path, topics_path, qrels_path)
            stop = (load_stopwords(stopwords_path) if stopwords_path
                    else default_stopwords())
            bundles = {}
            for sr_id in sorted(ingest.topics):
                bundles[sr_id] = build_topic_bundle(
                    ingest, sr_id, stop, emb_source, emb_params,
                    cache_dir=self.cache_dir)
            bundle = CorpusBundle(corpus_id=corpus_id, ingest=ingest,
                                  bundles=bundles, emb_source=emb_source)
            self.corpora[corpus_id] = bundle
            return bundle, True

    def corpus(self, corpus_id: str) -> CorpusBundle | None:
        return self.corpora.get(corpus_id)

    # --- sessions ----------------------------------------------------------

    def _session_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.json"

    def persist(self, rt: SessionRuntime) -> None:
        path = self._session_path(rt.session.session_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(session_to_json(rt)) + "\n")
        tmp.replace(path)

    def new_session(self, corpus_id: str, sr_id: str, seed_doc_ids: list[str],
                    model: str, params: dict, scorer: PairScorer,
                    candidates) -> SessionRuntime:
        session_id = uuid.uuid4().hex[:12]
        session = create_session(session_id, sr_id, candidates, seed_doc_ids,
                                 scorer, model=model, params=params)
        rt = SessionRuntime(session=session, corpus_id=corpus_id)
        with self._registry_lock:
            self.sessions[session_id] = rt
        self.persist(rt)
        return rt

    def get_session(self, session_id: str) -> SessionRuntime | None:
        rt = self.sessions.get(session_id)
        if rt is not None:
            return rt
        path = self._session_path(session_id)
        if not path.exists():
            return None
        rt = session_from_json(json.loads(path.read_text()))
        with self._registry_lock:
            self.sessions.setdefault(session_id, rt)
        return self.sessions[session_id]

    def scorer_for(self, rt: SessionRuntime) -> PairScorer:
        corpus = self.corpus(rt.corpus_id)
        if corpus is None:
            raise MirrorMatchError(
                f"corpus {rt.corpus_id!r} is not loaded; register it via POST /corpora"
            )
        bundle = corpus.bundles[rt.session.sr_id]
        mp, bp = params_from_dict(rt.session.params)
        return make_scorer(rt.session.model, bundle.ctx,
                           match_params=mp, baseline_params=bp)
