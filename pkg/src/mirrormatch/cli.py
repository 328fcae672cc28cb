"""Command-line entry points; thin wrappers over the library pipeline."""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from .corpus import ingest_corpus
from .embeddings import EmbeddingParams, save_embeddings
from .errors import MirrorMatchError
from .evaluation import (
    MetricsReport,
    RankedList,
    RankEntry,
    aggregate,
    format_trec_run,
    metrics_csv,
    metrics_for,
    parse_trec_run,
    pico_position_grid,
)
from .matching import MatchParams
from .pipeline import RunConfig, preprocess_topic, train_topic_embeddings
from .scorers import SCORER_NAMES, BaselineParams
from .screening import rank_candidates, simulate_session


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _parse_ks(value: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(x) for x in value.split(",") if x.strip())
    except ValueError:
        _fail(f"--k must be a comma-separated integer list, got {value!r}")
    if not ks or any(k < 1 for k in ks):
        _fail("--k values must be positive")
    return ks


def _embedding_params(dim, window, min_count, epochs, negative, lr, seed) -> EmbeddingParams:
    return EmbeddingParams(dim=dim, window=window, min_count=min_count,
                           epochs=epochs, negative_samples=negative,
                           learning_rate=lr, rng_seed=seed)


corpus_opts = [
    click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path), help="Corpus JSONL file."),
    click.option("--topics", "topics_path", required=True, type=click.Path(exists=True, path_type=Path), help="Topic definition JSON file."),
]

model_opts = [
    click.option("--model", default="mmatch", show_default=True, help=f"Scorer name ({', '.join(SCORER_NAMES)})."),
    click.option("--lambda", "window_frac", default=0.35, show_default=True, help="Matching window fraction of the target length."),
    click.option("--no-position", is_flag=True, help="Disable position-aware matching (full-width max pooling)."),
    click.option("--no-two-way", is_flag=True, help="Score the query-to-candidate direction only."),
    click.option("--k1", default=1.5, show_default=True, help="BM25 k1."),
    click.option("--b", default=0.75, show_default=True, help="BM25 b."),
    click.option("--ql-lambda", default=0.2, show_default=True, help="Weight of the collection model in JM smoothing (pass 1-x for the document-weight reading)."),
]

emb_opts = [
    click.option("--embeddings", "emb_source", default=None, help="'train' or a word2vec text file / directory of <sr_id>.vec files."),
    click.option("--seed", "rng_seed", default=None, type=int, help="RNG seed for embedding training."),
    click.option("--dim", default=300, show_default=True, help="Embedding dimensionality."),
    click.option("--window", default=7, show_default=True, help="Skip-gram context window."),
    click.option("--min-count", default=5, show_default=True, help="Minimum token frequency kept in the vocabulary."),
    click.option("--epochs", default=5, show_default=True, help="Training epochs."),
    click.option("--negative", default=5, show_default=True, help="Negative samples per pair."),
    click.option("--lr", default=0.025, show_default=True, help="Initial learning rate (linear decay)."),
    click.option("--cache-dir", default=None, type=click.Path(path_type=Path), help="Directory for trained-embedding caches."),
    click.option("--stopwords", "stopwords_path", default=None, type=click.Path(exists=True, path_type=Path), help="Custom stopword list (one token per line)."),
]


def _apply(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


def _run_config(corpus_path, topics_path, qrels_path, model, window_frac,
                no_position, no_two_way, k1, b, ql_lambda, emb_source,
                rng_seed, dim, window, min_count, epochs, negative, lr,
                cache_dir, stopwords_path) -> RunConfig:
    if model not in SCORER_NAMES:
        _fail(f"unknown model {model!r}; registered scorers: {', '.join(SCORER_NAMES)}")
    try:
        match_params = MatchParams(window_frac=window_frac,
                                   use_position=not no_position,
                                   use_two_way=not no_two_way)
    except ValueError as exc:
        _fail(str(exc))
    needs_training = emb_source == "train" or (emb_source is None and model in ("mmatch", "avgemb", "wmd"))
    if needs_training and rng_seed is None:
        _fail("embedding training needs --seed for reproducible runs")
    return RunConfig(
        corpus_path=corpus_path,
        topics_path=topics_path,
        qrels_path=qrels_path,
        model=model,
        match_params=match_params,
        baseline_params=BaselineParams(k1=k1, b=b, ql_lambda=ql_lambda),
        emb_source=emb_source,
        emb_params=_embedding_params(dim, window, min_count, epochs, negative, lr, rng_seed or 0),
        cache_dir=cache_dir,
        stopwords_path=stopwords_path,
    )


@click.group()
def main():
    """Seed-driven screening prioritization toolkit."""


@main.command("ingest")
@_apply(corpus_opts)
@click.option("--qrels", "qrels_path", default=None, type=click.Path(exists=True, path_type=Path), help="TREC-style qrels file.")
def cli_ingest(corpus_path, topics_path, qrels_path):
    """Validate corpus, topic, and qrels files and print a summary."""
    try:
        ingest = ingest_corpus(corpus_path, topics_path, qrels_path)
    except MirrorMatchError as exc:
        _fail(str(exc))
    click.echo(f"documents: {len(ingest.documents)}")
    for sr_id in sorted(ingest.topics):
        topic = ingest.topics[sr_id]
        n_rel = len(topic.relevant_ids)
        click.echo(f"topic {sr_id}: {len(topic.candidates)} candidates, "
                   f"{len(topic.qrels)} judged, {n_rel} relevant")


@main.command("train-embeddings")
@_apply(corpus_opts)
@_apply(emb_opts[1:])  # all but --embeddings
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path), help="Directory for <sr_id>.vec files.")
def cli_train_embeddings(corpus_path, topics_path, rng_seed, dim, window,
                         min_count, epochs, negative, lr, cache_dir,
                         stopwords_path, out_dir):
    """Train per-topic embeddings and write word2vec text files."""
    if rng_seed is None:
        _fail("embedding training needs --seed for reproducible runs")
    config = RunConfig(corpus_path=corpus_path, topics_path=topics_path,
                       emb_params=_embedding_params(dim, window, min_count, epochs,
                                                    negative, lr, rng_seed),
                       cache_dir=cache_dir, stopwords_path=stopwords_path)
    try:
        ingest = config.load()
        stop = config.stopwords()
        out_dir.mkdir(parents=True, exist_ok=True)
        for sr_id in sorted(ingest.topics):
            sequences, skipped = preprocess_topic(ingest, sr_id, stop)
            table = train_topic_embeddings(sequences, config.emb_params,
                                           cache_dir=config.cache_dir, sr_id=sr_id)
            save_embeddings(table, out_dir / f"{sr_id}.vec")
            note = f" ({len(skipped)} empty docs skipped)" if skipped else ""
            click.echo(f"topic {sr_id}: vocabulary {len(table)}, dim {table.dim}{note}")
    except MirrorMatchError as exc:
        _fail(str(exc))


@main.command("rank")
@_apply(corpus_opts)
@click.option("--qrels", "qrels_path", required=True, type=click.Path(exists=True, path_type=Path), help="Qrels file (seeds are the relevant documents).")
@_apply(model_opts)
@_apply(emb_opts)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path), help="TREC run output file.")
def cli_rank(corpus_path, topics_path, qrels_path, model, window_frac,
             no_position, no_two_way, k1, b, ql_lambda, emb_source, rng_seed,
             dim, window, min_count, epochs, negative, lr, cache_dir,
             stopwords_path, out_path):
    """Rank every topic's candidates from each relevant seed document."""
    config = _run_config(corpus_path, topics_path, qrels_path, model, window_frac,
                         no_position, no_two_way, k1, b, ql_lambda, emb_source,
                         rng_seed, dim, window, min_count, epochs, negative, lr,
                         cache_dir, stopwords_path)
    try:
        ingest = config.load()
        stop = config.stopwords()
        chunks = []
        for sr_id in sorted(ingest.topics):
            bundle = config.bundle(ingest, sr_id, stop)
            scorer = config.scorer(bundle)
            for seed in bundle.topic.relevant_ids:
                ranked = rank_candidates(scorer, seed, bundle.topic.candidates)
                chunks.append(format_trec_run(sr_id, ranked, tag=model))
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text("".join(chunks))
    except MirrorMatchError as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path}")


def _summary_payload(per_topic: dict[str, MetricsReport], overall: MetricsReport,
                     ks: tuple[int, ...]) -> dict:
    return {
        "topics": {sr: rep.as_dict() for sr, rep in sorted(per_topic.items())},
        "overall": overall.as_dict(),
        "ks": list(ks),
    }


@main.command("evaluate")
@click.option("--run", "run_path", required=True, type=click.Path(exists=True, path_type=Path), help="TREC run file produced by 'rank'.")
@click.option("--qrels", "qrels_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--k", "ks_text", default="10,20,30", show_default=True, help="Comma-separated cutoffs.")
@click.option("--out", "out_prefix", required=True, type=click.Path(path_type=Path), help="Output prefix; writes <prefix>.csv and <prefix>.json.")
def cli_evaluate(run_path, qrels_path, ks_text, out_prefix):
    """Score a run file: per-query CSV plus per-topic/overall JSON summary."""
    from .corpus import load_qrels

    ks = _parse_ks(ks_text)
    try:
        qrels = load_qrels(qrels_path)
        runs = parse_trec_run(run_path.read_text())
        if not runs:
            _fail(f"run file {run_path} is empty")
        rows = []
        by_topic: dict[str, list[MetricsReport]] = {}
        for (sr_id, query_id), entries in sorted(runs.items()):
            if sr_id not in qrels:
                _fail(f"run references unknown topic {sr_id!r}")
            topic_qrels = qrels[sr_id]
            for doc_id, _, _ in entries:
                if doc_id not in topic_qrels:
                    _fail(f"run references unknown doc {doc_id!r} in topic {sr_id}")
            ranked = RankedList(
                query_doc_id=query_id,
                entries=tuple(RankEntry(doc_id=d, score=s, rank=r)
                              for d, r, s in entries),
            )
            report = metrics_for(ranked, topic_qrels, ks)
            rows.append((sr_id, query_id, report))
            by_topic.setdefault(sr_id, []).append(report)
        per_topic = {sr: aggregate(reps) for sr, reps in by_topic.items()}
        overall = aggregate(list(per_topic.values()))
        out_prefix.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{out_prefix}.csv").write_text(metrics_csv(rows, ks))
        Path(f"{out_prefix}.json").write_text(
            json.dumps(_summary_payload(per_topic, overall, ks), indent=2) + "\n")
    except MirrorMatchError as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_prefix}.csv and {out_prefix}.json")


@main.command("simulate")
@_apply(corpus_opts)
@click.option("--qrels", "qrels_path", required=True, type=click.Path(exists=True, path_type=Path))
@_apply(model_opts)
@_apply(emb_opts)
@click.option("--batch", default=20, show_default=True, help="Documents labeled per round.")
@click.option("--rounds", default=3, show_default=True, help="Label-then-rerank rounds.")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path), help="Per-round metrics CSV.")
@click.option("--dump-rankings", "dump_dir", default=None, type=click.Path(path_type=Path), help="Also write per-seed per-round TREC fragments here.")
def cli_simulate(corpus_path, topics_path, qrels_path, model, window_frac,
                 no_position, no_two_way, k1, b, ql_lambda, emb_source,
                 rng_seed, dim, window, min_count, epochs, negative, lr,
                 cache_dir, stopwords_path, batch, rounds, out_path, dump_dir):
    """Simulate round-based screening: label a batch, re-rank, evaluate."""
    config = _run_config(corpus_path, topics_path, qrels_path, model, window_frac,
                         no_position, no_two_way, k1, b, ql_lambda, emb_source,
                         rng_seed, dim, window, min_count, epochs, negative, lr,
                         cache_dir, stopwords_path)
    if batch < 1 or rounds < 1:
        _fail("--batch and --rounds must be positive")
    try:
        ingest = config.load()
        stop = config.stopwords()
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["topic", "model", "round", "ap", "wss100", "n_queries"])
        per_round_topic: dict[int, list[tuple[float | None, float | None]]] = {}
        for sr_id in sorted(ingest.topics):
            bundle = config.bundle(ingest, sr_id, stop)
            scorer = config.scorer(bundle)
            topic = bundle.topic
            if len(topic.relevant_ids) < 2:
                click.echo(f"topic {sr_id}: skipped (fewer than 2 relevant documents)", err=True)
                continue
            per_seed = {}
            for seed in topic.relevant_ids:
                per_seed[seed] = simulate_session(topic.candidates, topic.qrels,
                                                  scorer, seed, batch=batch, rounds=rounds)
                if dump_dir is not None:
                    dump_dir.mkdir(parents=True, exist_ok=True)
                    for outcome in per_seed[seed]:
                        frag = format_trec_run(sr_id, outcome.ranking, tag=model)
                        name = f"{sr_id}__{seed}__round{outcome.round}.txt"
                        (dump_dir / name).write_text(frag)
            for r in range(rounds):
                aps = [runs[r].ap for runs in per_seed.values() if runs[r].ap is not None]
                wss = [runs[r].wss100 for runs in per_seed.values() if runs[r].wss100 is not None]
                ap = sum(aps) / len(aps) if aps else None
                w = sum(wss) / len(wss) if wss else None
                per_round_topic.setdefault(r, []).append((ap, w))
                writer.writerow([sr_id, model, r + 1,
                                 "" if ap is None else f"{ap:.6f}",
                                 "" if w is None else f"{w:.6f}",
                                 len(aps)])
        if not per_round_topic:
            _fail("no topic was eligible for simulation")
        for r in sorted(per_round_topic):
            aps = [a for a, _ in per_round_topic[r] if a is not None]
            wss = [w for _, w in per_round_topic[r] if w is not None]
            writer.writerow(["MEAN", model, r + 1,
                             "" if not aps else f"{sum(aps) / len(aps):.6f}",
                             "" if not wss else f"{sum(wss) / len(wss):.6f}",
                             len(aps)])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(buf.getvalue())
    except MirrorMatchError as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path}")


@main.command("pico-grid")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True, path_type=Path), help="JSONL with doc_id, tokens, labels fields.")
@click.option("--element", required=True, type=click.Choice(["P", "I", "O"]))
@click.option("--resolution", default=200, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def cli_pico_grid(labels_path, element, resolution, out_path):
    """Bin labeled token positions into a fixed-resolution 0/1 grid CSV."""
    docs = []
    try:
        with labels_path.open() as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                docs.append((str(obj["doc_id"]), list(obj["tokens"]), list(obj["labels"])))
        grid = pico_position_grid(docs, element, resolution)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(grid.to_csv())
    except (MirrorMatchError, json.JSONDecodeError, KeyError) as exc:
        _fail(f"{labels_path}: {exc}")
    click.echo(f"wrote {out_path} ({len(grid.rows)} rows x {grid.resolution} bins)")


@main.command("serve")
@click.option("--corpus", "corpus_path", default=None, type=click.Path(exists=True, path_type=Path), help="Preload this corpus at startup.")
@click.option("--topics", "topics_path", default=None, type=click.Path(exists=True, path_type=Path))
@click.option("--qrels", "qrels_path", default=None, type=click.Path(exists=True, path_type=Path))
@click.option("--embeddings", "emb_source", default="train", show_default=True)
@click.option("--seed", "rng_seed", default=None, type=int)
@click.option("--dim", default=300, show_default=True)
@click.option("--window", default=7, show_default=True)
@click.option("--min-count", default=5, show_default=True)
@click.option("--epochs", default=5, show_default=True)
@click.option("--negative", default=5, show_default=True)
@click.option("--lr", default=0.025, show_default=True)
@click.option("--stopwords", "stopwords_path", default=None, type=click.Path(exists=True, path_type=Path))
@click.option("--data-dir", default="./mirrormatch-data", show_default=True, type=click.Path(path_type=Path), help="Session and cache storage.")
@click.option("--ui-dir", default=None, type=click.Path(path_type=Path), help="Static UI bundle to mount at /ui (defaults to ./frontend/dist when present).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def cli_serve(corpus_path, topics_path, qrels_path, emb_source, rng_seed, dim,
              window, min_count, epochs, negative, lr, stopwords_path,
              data_dir, ui_dir, host, port):
    """Run the HTTP screening service."""
    import uvicorn

    from .service.app import create_app
    from .service.state import PreloadSpec, ServiceConfig

    preload = None
    if corpus_path is not None:
        if topics_path is None:
            _fail("--corpus needs --topics")
        if emb_source == "train" and rng_seed is None:
            _fail("embedding training needs --seed for reproducible runs")
        preload = PreloadSpec(
            corpus_path=corpus_path, topics_path=topics_path, qrels_path=qrels_path,
            emb_source=emb_source,
            emb_params=_embedding_params(dim, window, min_count, epochs, negative,
                                         lr, rng_seed or 0),
            stopwords_path=stopwords_path,
        )
    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = Path("frontend/dist")
    app = create_app(ServiceConfig(data_dir=data_dir, preload=preload, ui_dir=ui_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
