"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class EmbeddingSpec(BaseModel):
    """Where a corpus gets its word vectors.

    ``source`` is "train" (requires ``seed``) or a path to a word2vec text
    file / directory of per-topic files.
    """

    source: str = "train"
    seed: int | None = None
    dim: int = 300
    window: int = 7
    min_count: int = 5
    negative: int = 5
    epochs: int = 5
    learning_rate: float = 0.025


class CorpusCreateRequest(BaseModel):
    corpus_path: str
    topics_path: str
    qrels_path: str | None = None
    stopwords_path: str | None = None
    embeddings: EmbeddingSpec = EmbeddingSpec()


class TopicSummary(BaseModel):
    sr_id: str
    candidates: int
    judged: int
    relevant: int
    vocab_size: int | None = None
    skipped_docs: list[str] = []


class CorpusInfo(BaseModel):
    corpus_id: str
    topics: list[TopicSummary]


class ScorerParams(BaseModel):
    """Scorer knobs; the window fraction travels as "lambda" on the wire."""

    model_config = ConfigDict(populate_by_name=True)

    window_frac: float = Field(0.35, alias="lambda", gt=0.0, le=1.0)
    use_position: bool = True
    use_two_way: bool = True
    k1: float = 1.5
    b: float = 0.75
    ql_lambda: float = Field(0.2, gt=0.0, lt=1.0)

    def as_dict(self) -> dict:
        return {
            "lambda": self.window_frac,
            "use_position": self.use_position,
            "use_two_way": self.use_two_way,
            "k1": self.k1,
            "b": self.b,
            "ql_lambda": self.ql_lambda,
        }


class SessionCreateRequest(BaseModel):
    corpus_id: str
    sr_id: str
    seed_doc_ids: list[str] = Field(min_length=1)
    model: str = "mmatch"
    params: ScorerParams = ScorerParams()


class RankingEntry(BaseModel):
    position: int
    doc_id: str
    score: float
    title: str
    snippet: str


class RankingPage(BaseModel):
    session_id: str
    round: int
    total: int
    offset: int
    limit: int
    entries: list[RankingEntry]


class SessionCreated(BaseModel):
    session_id: str
    corpus_id: str
    sr_id: str
    model: str
    round: int
    ranking: RankingPage


class LabelItem(BaseModel):
    doc_id: str
    label: Literal["relevant", "irrelevant"]


class LabelsAccepted(BaseModel):
    session_id: str
    accepted: int
    pending_total: int
    duplicate: bool = False


class UpdateResponse(BaseModel):
    session_id: str
    round: int
    ranking: RankingPage


class ProgressPoint(BaseModel):
    round: int
    labels: int
    relevant_found: int
    recall: float | None = None


class Progress(BaseModel):
    session_id: str
    round: int
    labels_total: int
    pending: int
    relevant_found: int
    total_relevant: int | None = None
    curve: list[ProgressPoint]


class ExportPayload(BaseModel):
    session_id: str
    trec_run: str
    session: dict
