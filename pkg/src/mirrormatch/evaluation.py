"""Ranking metrics, per-topic evaluation, and the positional label grid.

Metrics follow the screening-prioritization conventions: average precision,
precision/recall at k, and work-saved-over-sampling at total recall (the
fraction of candidates ranked below the last relevant document). Topics are
evaluated query-by-query (each relevant document once as the seed) and
averaged, then averaged again across topics.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .corpus import SRTopic
from .errors import (
    EmptyCandidateSet,
    NoRelevant,
    ParseError,
    SkippedTopic,
    UnknownLabel,
)
from .scorers import PairScorer

DEFAULT_KS = (10, 20, 30)


@dataclass(frozen=True)
class RankEntry:
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    """Candidates ordered by descending score; ties break by ascending doc_id."""

    query_doc_id: str
    entries: tuple[RankEntry, ...]

    def __post_init__(self):
        for pos, e in enumerate(self.entries, start=1):
            if e.rank != pos:
                raise ValueError("ranks must be contiguous from 1")
            if e.doc_id == self.query_doc_id:
                raise ValueError("query document may not appear among entries")
        scores = [e.score for e in self.entries]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("scores must be non-increasing with rank")

    @property
    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def build_ranked_list(query_doc_id: str, scored: dict[str, float]) -> RankedList:
    """Sort (doc -> score) into a ranked list with the deterministic tie rule."""
    if not scored:
        raise EmptyCandidateSet("no candidates to rank")
    ordered = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
    entries = tuple(RankEntry(doc_id=d, score=s, rank=r)
                    for r, (d, s) in enumerate(ordered, start=1))
    return RankedList(query_doc_id=query_doc_id, entries=entries)


@dataclass(frozen=True)
class MetricsReport:
    ap: float
    pr_at: dict[int, float]
    re_at: dict[int, float]
    wss100: float

    def as_dict(self) -> dict[str, float]:
        out = {"ap": self.ap}
        for k in sorted(self.pr_at):
            out[f"pr{k}"] = self.pr_at[k]
        for k in sorted(self.re_at):
            out[f"re{k}"] = self.re_at[k]
        out["wss100"] = self.wss100
        return out


def _relevant_ranks(ranked: RankedList, qrels: dict[str, bool]) -> list[int]:
    return [e.rank for e in ranked.entries if qrels.get(e.doc_id, False)]


def average_precision(ranked: RankedList, qrels: dict[str, bool]) -> float:
    """Mean over relevant documents of precision at their ranks."""
    ranks = _relevant_ranks(ranked, qrels)
    if not ranks:
        raise NoRelevant(f"no relevant document ranked for query {ranked.query_doc_id!r}")
    return sum(hit / rank for hit, rank in enumerate(ranks, start=1)) / len(ranks)


def precision_at_k(ranked: RankedList, qrels: dict[str, bool], k: int) -> float:
    """Relevant fraction of the top k (divisor stays k on short lists)."""
    hits = sum(1 for e in ranked.entries[:k] if qrels.get(e.doc_id, False))
    return hits / k


def recall_at_k(ranked: RankedList, qrels: dict[str, bool], k: int) -> float:
    """Fraction of all ranked relevant documents found in the top k."""
    total = len(_relevant_ranks(ranked, qrels))
    if total == 0:
        raise NoRelevant(f"no relevant document ranked for query {ranked.query_doc_id!r}")
    hits = sum(1 for e in ranked.entries[:k] if qrels.get(e.doc_id, False))
    return hits / total


def wss100(ranked: RankedList, qrels: dict[str, bool]) -> float:
    """Fraction of candidates ranked below the last relevant document."""
    ranks = _relevant_ranks(ranked, qrels)
    if not ranks:
        raise NoRelevant(f"no relevant document ranked for query {ranked.query_doc_id!r}")
    n = len(ranked.entries)
    return (n - max(ranks)) / n


def metrics_for(ranked: RankedList, qrels: dict[str, bool],
                ks=DEFAULT_KS) -> MetricsReport:
    return MetricsReport(
        ap=average_precision(ranked, qrels),
        pr_at={k: precision_at_k(ranked, qrels, k) for k in ks},
        re_at={k: recall_at_k(ranked, qrels, k) for k in ks},
        wss100=wss100(ranked, qrels),
    )


def rank_with_scorer(scorer: PairScorer, query_doc_id: str,
                     candidates) -> RankedList:
    scored = {d: scorer(query_doc_id, d) for d in candidates if d != query_doc_id}
    return build_ranked_list(query_doc_id, scored)


def evaluate_topic(topic: SRTopic, scorer: PairScorer,
                   ks=DEFAULT_KS) -> tuple[MetricsReport, dict[str, MetricsReport]]:
    """Evaluate one topic: each relevant document queries the rest.

    Returns the per-topic mean report and the per-query reports. Topics with
    fewer than two relevant documents raise :class:`SkippedTopic`.
    """
    relevant = topic.relevant_ids
    if len(relevant) < 2:
        raise SkippedTopic(f"topic {topic.sr_id} has {len(relevant)} relevant document(s)")
    per_query: dict[str, MetricsReport] = {}
    for seed in relevant:
        ranked = rank_with_scorer(scorer, seed, sorted(topic.candidates))
        per_query[seed] = metrics_for(ranked, topic.qrels, ks)
    return aggregate(list(per_query.values())), per_query


def aggregate(reports: list[MetricsReport]) -> MetricsReport:
    """Unweighted arithmetic mean per metric."""
    if not reports:
        raise ValueError("nothing to aggregate")
    n = len(reports)
    ks_pr = reports[0].pr_at.keys()
    ks_re = reports[0].re_at.keys()
    return MetricsReport(
        ap=sum(r.ap for r in reports) / n,
        pr_at={k: sum(r.pr_at[k] for r in reports) / n for k in ks_pr},
        re_at={k: sum(r.re_at[k] for r in reports) / n for k in ks_re},
        wss100=sum(r.wss100 for r in reports) / n,
    )


# --- TREC run IO ---------------------------------------------------------------

def format_trec_run(sr_id: str, ranked: RankedList, tag: str) -> str:
    """Render one ranked list as TREC run lines.

    The query field combines the topic and the seed document
    ("<sr_id>:<query_doc_id>") so per-seed rankings stay distinguishable.
    """
    qid = f"{sr_id}:{ranked.query_doc_id}" if ranked.query_doc_id else sr_id
    return "".join(
        f"{qid} Q0 {e.doc_id} {e.rank} {e.score:.6f} {tag}\n" for e in ranked.entries
    )


def parse_trec_run(text: str) -> dict[tuple[str, str], list[tuple[str, int, float]]]:
    """Parse run lines into {(sr_id, query_doc_id): [(doc_id, rank, score)]}.

    Entries are returned sorted by their recorded rank.
    """
    runs: dict[tuple[str, str], list[tuple[str, int, float]]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ParseError("expected 6 whitespace-separated fields", line=lineno)
        qid, _, doc_id, rank, score, _tag = parts
        sr_id, _, query_doc = qid.partition(":")
        try:
            runs.setdefault((sr_id, query_doc), []).append((doc_id, int(rank), float(score)))
        except ValueError:
            raise ParseError("rank/score fields must be numeric", line=lineno) from None
    for entries in runs.values():
        entries.sort(key=lambda e: e[1])
    return runs


def metrics_csv(rows: list[tuple[str, str, MetricsReport]], ks=DEFAULT_KS) -> str:
    """Render per-query metric rows as CSV (topic, query, metrics...)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["topic", "query_doc_id", "ap"]
    header += [f"pr{k}" for k in ks] + [f"re{k}" for k in ks] + ["wss100"]
    writer.writerow(header)
    for sr_id, query_id, rep in rows:
        row = [sr_id, query_id, f"{rep.ap:.6f}"]
        row += [f"{rep.pr_at[k]:.6f}" for k in ks]
        row += [f"{rep.re_at[k]:.6f}" for k in ks]
        row.append(f"{rep.wss100:.6f}")
        writer.writerow(row)
    return buf.getvalue()


# --- positional label grid -----------------------------------------------------

GRID_LABELS = ("P", "I", "O", "N")


@dataclass(frozen=True)
class PositionGrid:
    """Per-document bit rows marking where an element label occurs.

    Rows are ordered by descending document length (ties by doc_id).
    """

    element: str
    doc_ids: tuple[str, ...]
    lengths: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    @property
    def resolution(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def to_csv(self) -> str:
        return "".join(",".join(str(c) for c in row) + "\n" for row in self.rows)


def pico_position_grid(labeled_docs, element: str, resolution: int = 200) -> PositionGrid:
    """Bin labeled token positions into fixed-resolution rows.

    ``labeled_docs`` yields (doc_id, tokens, labels) triples with equal-length
    token/label lists and labels drawn from P/I/O/N. Token p of a length-L
    document lands in bin ceil(p * R / L).
    """
    if element not in ("P", "I", "O"):
        raise UnknownLabel(f"element must be one of P, I, O; got {element!r}")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    docs = []
    for doc_id, tokens, labels in labeled_docs:
        if len(tokens) != len(labels):
            raise ParseError(f"doc {doc_id}: tokens and labels differ in length")
        bad = set(labels) - set(GRID_LABELS)
        if bad:
            raise UnknownLabel(f"doc {doc_id}: unknown label(s) {sorted(bad)}")
        if not tokens:
            continue
        length = len(tokens)
        row = [0] * resolution
        for p, label in enumerate(labels, start=1):
            if label == element:
                row[(p * resolution + length - 1) // length - 1] = 1
        docs.append((doc_id, length, tuple(row)))
    docs.sort(key=lambda d: (-d[1], d[0]))
    return PositionGrid(
        element=element,
        doc_ids=tuple(d[0] for d in docs),
        lengths=tuple(d[1] for d in docs),
        rows=tuple(d[2] for d in docs),
    )
