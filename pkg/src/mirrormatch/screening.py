"""Label-then-rerank screening workflow.

A session starts from one or more known-relevant seed documents, ranks the
unlabeled candidates, and after each labeled batch re-ranks the remainder:
every known-relevant document produces its own ranked list and the lists are
combined by averaging each document's ranks (score scales differ across
seeds, so ranks carry equal weight).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .corpus import SRTopic
from .errors import (
    AlreadyLabeled,
    EmptyCandidateSet,
    MismatchedDocumentSets,
    SkippedTopic,
    TooFewRelevant,
    UnknownDoc,
)
from .evaluation import (
    RankedList,
    average_precision,
    build_ranked_list,
    rank_with_scorer,
    wss100,
)
from .matching import MatchParams, mirror_match
from .scorers import PairScorer, TopicContext


def rank_candidates(scorer: PairScorer, seed: str, candidates) -> RankedList:
    """Rank candidates against one seed; descending score, ties by doc_id."""
    pool = sorted(set(candidates) - {seed})
    if not pool:
        raise EmptyCandidateSet(f"no candidates to rank against seed {seed!r}")
    return rank_with_scorer(scorer, seed, pool)


def fuse_rankings(lists: list[RankedList]) -> RankedList:
    """Average each document's ranks across lists and sort ascending.

    The fused score field carries the negated average rank, so the usual
    descending-score ordering applies unchanged.
    """
    if not lists:
        raise ValueError("need at least one ranked list to fuse")
    base = set(lists[0].doc_ids)
    totals: dict[str, float] = {d: 0.0 for d in base}
    for lst in lists:
        if set(lst.doc_ids) != base:
            raise MismatchedDocumentSets("ranked lists cover different document sets")
        for e in lst.entries:
            totals[e.doc_id] += e.rank
    k = len(lists)
    return build_ranked_list("", {d: -(t / k) for d, t in totals.items()})


def _empty_ranking() -> RankedList:
    return RankedList(query_doc_id="", entries=())


@dataclass
class RoundRecord:
    """History entry for one completed update round."""

    round: int
    ranking: RankedList
    labels_added: list[tuple[str, bool]]


@dataclass
class Session:
    """Mutable screening state for one review.

    ``current`` is the fused ranking over still-unlabeled candidates;
    ``history`` holds one record per completed update round (the initial
    ranking is round 0 and lives in ``current`` until the first update).
    """

    session_id: str
    sr_id: str
    model: str
    params: dict
    candidates: frozenset[str]
    seed_ids: list[str]
    labels: dict[str, bool]
    label_order: list[str] = field(default_factory=list)
    current: RankedList = field(default_factory=_empty_ranking)
    history: list[RoundRecord] = field(default_factory=list)

    @property
    def round(self) -> int:
        return len(self.history)

    @property
    def unlabeled(self) -> set[str]:
        return set(self.candidates) - set(self.labels)

    @property
    def relevant_found(self) -> int:
        return sum(1 for rel in self.labels.values() if rel)


def _fused_ranking(seed_ids: list[str], unlabeled: set[str], scorer: PairScorer) -> RankedList:
    if not unlabeled:
        return _empty_ranking()
    per_seed = [rank_with_scorer(scorer, s, sorted(unlabeled)) for s in seed_ids]
    return fuse_rankings(per_seed)


def create_session(session_id: str, sr_id: str, candidates, seed_ids: list[str],
                   scorer: PairScorer, model: str = "", params: dict | None = None) -> Session:
    """Open a session: seeds are labeled relevant and the rest get ranked."""
    candidates = frozenset(candidates)
    if not seed_ids:
        raise ValueError("at least one seed document is required")
    for s in seed_ids:
        if s not in candidates:
            raise UnknownDoc(f"seed {s!r} is not a candidate")
    if len(set(seed_ids)) != len(seed_ids):
        raise AlreadyLabeled("duplicate seed document")
    unlabeled = set(candidates) - set(seed_ids)
    if not unlabeled:
        raise EmptyCandidateSet("no unlabeled candidates remain after seeding")
    session = Session(
        session_id=session_id,
        sr_id=sr_id,
        model=model,
        params=dict(params or {}),
        candidates=candidates,
        seed_ids=list(seed_ids),
        labels={s: True for s in seed_ids},
        label_order=list(seed_ids),
    )
    session.current = _fused_ranking(session.seed_ids, unlabeled, scorer)
    return session


def update_session(session: Session, new_labels: list[tuple[str, bool]],
                   scorer: PairScorer) -> RankedList:
    """Fold a labeled batch into the session and re-rank what remains.

    Newly relevant documents join the seed set, so the refreshed ranking
    fuses one list per known-relevant document. Appends a history record and
    returns the fresh fused ranking.
    """
    seen_batch: set[str] = set()
    for doc_id, _ in new_labels:
        if doc_id not in session.candidates:
            raise UnknownDoc(f"document {doc_id!r} is not a session candidate")
        if doc_id in session.labels or doc_id in seen_batch:
            raise AlreadyLabeled(f"document {doc_id!r} already labeled")
        seen_batch.add(doc_id)
    for doc_id, rel in new_labels:
        session.labels[doc_id] = rel
        session.label_order.append(doc_id)
        if rel:
            session.seed_ids.append(doc_id)
    session.current = _fused_ranking(session.seed_ids, session.unlabeled, scorer)
    session.history.append(RoundRecord(
        round=len(session.history) + 1,
        ranking=session.current,
        labels_added=list(new_labels),
    ))
    return session.current


# --- screening simulation ------------------------------------------------------

@dataclass(frozen=True)
class RoundOutcome:
    """Metrics over the unlabeled remainder after one round's update.

    ``ap``/``wss100`` are None when no relevant documents (or no documents at
    all) remain unlabeled.
    """

    round: int
    ap: float | None
    wss100: float | None
    labeled_total: int
    relevant_found: int
    ranking: RankedList


def simulate_session(candidates, qrels: dict[str, bool], scorer: PairScorer,
                     seed: str, batch: int = 20, rounds: int = 3) -> list[RoundOutcome]:
    """Replay the screening process for one starting seed.

    Each round labels the top ``batch`` unlabeled documents using the ground
    truth, updates the session, and evaluates the refreshed ranking.
    """
    session = create_session("sim", "sim", candidates, [seed], scorer)
    outcomes = []
    for r in range(1, rounds + 1):
        batch_docs = session.current.doc_ids[:batch]
        new_labels = [(d, bool(qrels[d])) for d in batch_docs]
        update_session(session, new_labels, scorer)
        remaining = session.current
        has_rel = any(qrels.get(d, False) for d in remaining.doc_ids)
        outcomes.append(RoundOutcome(
            round=r,
            ap=average_precision(remaining, qrels) if has_rel else None,
            wss100=wss100(remaining, qrels) if has_rel else None,
            labeled_total=len(session.labels),
            relevant_found=session.relevant_found,
            ranking=remaining,
        ))
    return outcomes


@dataclass(frozen=True)
class RoundMetrics:
    """Per-round metrics averaged over all starting seeds of a topic."""

    round: int
    ap: float | None
    wss100: float | None
    n_queries: int


def simulate_rounds(topic: SRTopic, scorer: PairScorer,
                    batch: int = 20, rounds: int = 3) -> list[RoundMetrics]:
    """Run :func:`simulate_session` from every relevant seed and average.

    Rounds where a seed has no relevant documents left unlabeled drop out of
    that round's mean; ``n_queries`` reports how many seeds contributed.
    """
    relevant = topic.relevant_ids
    if len(relevant) < 2:
        raise SkippedTopic(f"topic {topic.sr_id} has {len(relevant)} relevant document(s)")
    per_seed = [simulate_session(topic.candidates, topic.qrels, scorer, seed,
                                 batch=batch, rounds=rounds)
                for seed in relevant]
    results = []
    for r in range(rounds):
        aps = [run[r].ap for run in per_seed if run[r].ap is not None]
        wss = [run[r].wss100 for run in per_seed if run[r].wss100 is not None]
        results.append(RoundMetrics(
            round=r + 1,
            ap=sum(aps) / len(aps) if aps else None,
            wss100=sum(wss) / len(wss) if wss else None,
            n_queries=len(aps),
        ))
    return results


# --- analyses -------------------------------------------------------------------

def two_way_pair_analysis(ctx: TopicContext, params: MatchParams | None = None) -> float:
    """Fraction of adjacent (relevant, non-relevant) pairs promoted by the
    reverse direction.

    For each query, every relevant candidate is paired with the non-relevant
    candidate closest to it under the query->candidate score alone; the pair
    counts when the relevant side has the strictly greater candidate->query
    score. Returns the mean per-query fraction.
    """
    params = replace(params or MatchParams(), use_two_way=True)
    topic = ctx.topic
    fractions = []
    for query in topic.relevant_ids:
        others = sorted(topic.candidates - {query})
        scores = {d: mirror_match(ctx.seq(query), ctx.seq(d), params, ctx.emb)
                  for d in others}
        rel = [d for d in others if topic.qrels.get(d, False)]
        non = [d for d in others if not topic.qrels.get(d, False)]
        if not rel or not non:
            continue
        wins = 0
        for r in rel:
            nearest = min(non, key=lambda n: (abs(scores[r].sc_q_to_d - scores[n].sc_q_to_d), n))
            if scores[r].sc_d_to_q > scores[nearest].sc_d_to_q:
                wins += 1
        fractions.append(wins / len(rel))
    if not fractions:
        raise TooFewRelevant(f"topic {topic.sr_id} yields no (relevant, non-relevant) pairs")
    return sum(fractions) / len(fractions)


def topic_specificity(ctx: TopicContext, params: MatchParams | None = None) -> float:
    """Minimum normalized pairwise similarity among relevant documents.

    Similarity is the two-way matching total divided by 2, so identical
    documents score 1.0. Low values flag broad-topic reviews.
    """
    params = replace(params or MatchParams(), use_two_way=True)
    relevant = ctx.topic.relevant_ids
    if len(relevant) < 2:
        raise TooFewRelevant(f"topic {ctx.topic.sr_id} has fewer than 2 relevant documents")
    best = None
    for i, a in enumerate(relevant):
        for b in relevant[i + 1:]:
            sim = mirror_match(ctx.seq(a), ctx.seq(b), params, ctx.emb).total / 2.0
            if best is None or sim < best:
                best = sim
    return best
