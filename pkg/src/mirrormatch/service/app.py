"""HTTP service exposing corpora, ranking sessions, and the re-rank loop.

Error mapping: malformed requests return 400, unknown identifiers 404,
re-labeling conflicts 409, and other domain errors 422.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..embeddings import EmbeddingParams
from ..errors import AlreadyLabeled, MirrorMatchError
from ..screening import update_session
from . import schemas
from .state import (
    ServiceConfig,
    ServiceState,
    SessionRuntime,
    session_to_json,
)


def _embedding_params(spec: schemas.EmbeddingSpec) -> EmbeddingParams:
    return EmbeddingParams(dim=spec.dim, window=spec.window,
                           min_count=spec.min_count,
                           negative_samples=spec.negative, epochs=spec.epochs,
                           learning_rate=spec.learning_rate,
                           rng_seed=spec.seed if spec.seed is not None else 0)


def _corpus_info(bundle) -> schemas.CorpusInfo:
    topics = []
    for sr_id in sorted(bundle.bundles):
        tb = bundle.bundles[sr_id]
        topics.append(schemas.TopicSummary(
            sr_id=sr_id,
            candidates=len(tb.topic.candidates),
            judged=len(tb.topic.qrels),
            relevant=len(tb.topic.relevant_ids),
            vocab_size=len(tb.ctx.emb) if tb.ctx.emb is not None else None,
            skipped_docs=list(tb.skipped_docs),
        ))
    return schemas.CorpusInfo(corpus_id=bundle.corpus_id, topics=topics)


def _snippet(text: str, limit: int = 280) -> str:
    return text if len(text) <= limit else text[: limit - 1] + "…"


def create_app(config: ServiceConfig) -> FastAPI:
    state = ServiceState(config)
    app = FastAPI(title="mirrormatch screening service")
    app.state.service = state

    if config.preload is not None:
        p = config.preload
        state.register_corpus(Path(p.corpus_path), Path(p.topics_path),
                              Path(p.qrels_path) if p.qrels_path else None,
                              p.emb_source, p.emb_params, p.stopwords_path)

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(MirrorMatchError)
    async def domain_error(request: Request, exc: MirrorMatchError):
        status = 409 if isinstance(exc, AlreadyLabeled) else 422
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    def _session_or_404(session_id: str) -> SessionRuntime:
        rt = state.get_session(session_id)
        if rt is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return rt

    def _corpus_or_404(corpus_id: str):
        bundle = state.corpus(corpus_id)
        if bundle is None:
            raise HTTPException(status_code=404, detail=f"unknown corpus {corpus_id!r}")
        return bundle

    def _ranking_page(rt: SessionRuntime, offset: int, limit: int) -> schemas.RankingPage:
        corpus = _corpus_or_404(rt.corpus_id)
        docs = corpus.bundles[rt.session.sr_id].documents
        labeled = rt.visible_labels
        visible = [e for e in rt.session.current.entries if e.doc_id not in labeled]
        window = visible[offset:offset + limit]
        entries = [
            schemas.RankingEntry(
                position=offset + i + 1,
                doc_id=e.doc_id,
                score=e.score,
                title=docs[e.doc_id].title,
                snippet=_snippet(docs[e.doc_id].abstract),
            )
            for i, e in enumerate(window)
        ]
        return schemas.RankingPage(
            session_id=rt.session.session_id,
            round=rt.session.round,
            total=len(visible),
            offset=offset,
            limit=limit,
            entries=entries,
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "corpora": sorted(state.corpora)}

    @app.post("/corpora", response_model=schemas.CorpusInfo, status_code=201)
    def create_corpus(req: schemas.CorpusCreateRequest):
        if req.embeddings.source == "train" and req.embeddings.seed is None:
            raise MirrorMatchError("embedding training requires an explicit seed")
        for path_str, label in ((req.corpus_path, "corpus_path"),
                                (req.topics_path, "topics_path")):
            if not Path(path_str).exists():
                raise MirrorMatchError(f"{label} {path_str!r} does not exist")
        if req.qrels_path is not None and not Path(req.qrels_path).exists():
            raise MirrorMatchError(f"qrels_path {req.qrels_path!r} does not exist")
        bundle, _created = state.register_corpus(
            Path(req.corpus_path), Path(req.topics_path),
            Path(req.qrels_path) if req.qrels_path else None,
            req.embeddings.source, _embedding_params(req.embeddings),
            Path(req.stopwords_path) if req.stopwords_path else None,
        )
        return _corpus_info(bundle)

    @app.get("/corpora/{corpus_id}", response_model=schemas.CorpusInfo)
    def get_corpus(corpus_id: str):
        return _corpus_info(_corpus_or_404(corpus_id))

    @app.post("/sessions", response_model=schemas.SessionCreated, status_code=201)
    def create_screening_session(req: schemas.SessionCreateRequest):
        corpus = _corpus_or_404(req.corpus_id)
        if req.sr_id not in corpus.bundles:
            raise HTTPException(status_code=404,
                                detail=f"unknown topic {req.sr_id!r} in corpus {req.corpus_id}")
        tb = corpus.bundles[req.sr_id]
        from .state import params_from_dict
        from ..scorers import make_scorer

        params = req.params.as_dict()
        mp, bp = params_from_dict(params)
        scorer = make_scorer(req.model, tb.ctx, match_params=mp, baseline_params=bp)
        rt = state.new_session(req.corpus_id, req.sr_id, req.seed_doc_ids,
                               req.model, params, scorer, tb.topic.candidates)
        return schemas.SessionCreated(
            session_id=rt.session.session_id,
            corpus_id=req.corpus_id,
            sr_id=req.sr_id,
            model=req.model,
            round=rt.session.round,
            ranking=_ranking_page(rt, 0, 20),
        )

    @app.get("/sessions/{session_id}/ranking", response_model=schemas.RankingPage)
    def get_ranking(session_id: str, offset: int = 0, limit: int = 20):
        if offset < 0 or limit < 1 or limit > 500:
            raise HTTPException(status_code=400,
                                detail="offset must be >= 0 and 1 <= limit <= 500")
        return _ranking_page(_session_or_404(session_id), offset, limit)

    @app.post("/sessions/{session_id}/labels", response_model=schemas.LabelsAccepted)
    def post_labels(session_id: str, items: list[schemas.LabelItem],
                    idempotency_key: str | None = Header(default=None)):
        rt = _session_or_404(session_id)
        with rt.lock:
            if idempotency_key is not None and idempotency_key in rt.tokens:
                return schemas.LabelsAccepted(
                    session_id=session_id, accepted=0,
                    pending_total=len(rt.pending), duplicate=True)
            labeled = rt.visible_labels
            batch_ids = set()
            for item in items:
                if item.doc_id not in rt.session.candidates:
                    raise MirrorMatchError(
                        f"document {item.doc_id!r} is not a session candidate")
                if item.doc_id in labeled or item.doc_id in batch_ids:
                    raise AlreadyLabeled(f"document {item.doc_id!r} already labeled")
                batch_ids.add(item.doc_id)
            rt.pending.extend((i.doc_id, i.label == "relevant") for i in items)
            if idempotency_key is not None:
                rt.tokens.add(idempotency_key)
            state.persist(rt)
            return schemas.LabelsAccepted(
                session_id=session_id, accepted=len(items),
                pending_total=len(rt.pending))

    @app.post("/sessions/{session_id}/update", response_model=schemas.UpdateResponse)
    def post_update(session_id: str):
        rt = _session_or_404(session_id)
        with rt.lock:
            scorer = state.scorer_for(rt)
            batch = list(rt.pending)
            update_session(rt.session, batch, scorer)
            rt.pending.clear()
            state.persist(rt)
            return schemas.UpdateResponse(
                session_id=session_id,
                round=rt.session.round,
                ranking=_ranking_page(rt, 0, 20),
            )

    @app.get("/sessions/{session_id}/progress", response_model=schemas.Progress)
    def get_progress(session_id: str):
        rt = _session_or_404(session_id)
        s = rt.session
        corpus = state.corpus(rt.corpus_id)
        total_relevant = None
        if corpus is not None:
            qrels = corpus.bundles[s.sr_id].topic.qrels
            if qrels:
                total_relevant = sum(1 for v in qrels.values() if v)
        n_seeds = len(s.label_order) - sum(len(r.labels_added) for r in s.history)
        curve: list[schemas.ProgressPoint] = []
        labels_cum = 0
        rel_cum = 0
        seed_rel = n_seeds  # seeds are labeled relevant by definition
        for rec in s.history:
            labels_cum += len(rec.labels_added)
            rel_cum += sum(1 for _, v in rec.labels_added if v)
            recall = None
            if total_relevant:
                recall = (seed_rel + rel_cum) / total_relevant
            curve.append(schemas.ProgressPoint(
                round=rec.round, labels=labels_cum,
                relevant_found=rel_cum, recall=recall))
        pending_rel = sum(1 for _, v in rt.pending if v)
        return schemas.Progress(
            session_id=session_id,
            round=s.round,
            labels_total=labels_cum + len(rt.pending),
            pending=len(rt.pending),
            relevant_found=rel_cum + pending_rel,
            total_relevant=total_relevant,
            curve=curve,
        )

    @app.get("/sessions/{session_id}/export", response_model=schemas.ExportPayload)
    def get_export(session_id: str):
        from ..evaluation import format_trec_run

        rt = _session_or_404(session_id)
        run = format_trec_run(rt.session.sr_id, rt.session.current,
                              tag=rt.session.model or "session")
        return schemas.ExportPayload(
            session_id=session_id,
            trec_run=run,
            session=session_to_json(rt),
        )

    return app
