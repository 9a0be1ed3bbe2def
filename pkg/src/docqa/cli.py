"""Command line entry points: serve the HTTP API, ingest documents, and run
the evaluation harness."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import EngineConfig, load_config
from .engine import Engine
from .evalharness import (
    ChunkingExperiment,
    run_chunking_benchmark,
    run_generation_eval,
    run_retrieval_benchmark,
    write_reports,
)
from .evalharness.wikiqa import build_wikiqa_corpus, parse_wikiqa_tsv
from .ingest import ChunkerSettings

logger = logging.getLogger(__name__)


def _parse_ks(value: str) -> list[int]:
    return sorted({int(part) for part in value.split(",") if part.strip()})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engine", description="Document-grounded question answering engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", help="path to a YAML config file")
    serve.add_argument("--data-dir", help="data directory override")
    serve.add_argument("--port", type=int, help="listen port override")
    serve.add_argument("--host", help="bind address override")

    ingest = sub.add_parser("ingest", help="ingest one document file")
    ingest.add_argument("file", help="PDF or UTF-8 text file")
    ingest.add_argument("--config", help="path to a YAML config file")
    ingest.add_argument("--data-dir", help="data directory override")
    ingest.add_argument("--format", choices=["pdf", "plain_text"], help="override format detection")

    evaluate = sub.add_parser("eval", help="run an evaluation")
    eval_sub = evaluate.add_subparsers(dest="eval_kind", required=True)

    retrieval = eval_sub.add_parser("retrieval", help="P/R/F1 depth sweep over a document corpus")
    retrieval.add_argument("--corpus", required=True, help="corpus.jsonl with {_id, title, text}")
    retrieval.add_argument("--queries", required=True, help="queries.jsonl with {_id, text}")
    retrieval.add_argument("--qrels", required=True, help="qrels TSV query-id<TAB>doc-id<TAB>score")
    retrieval.add_argument("--config", help="path to a YAML config file")
    retrieval.add_argument("--out", default="eval_out", help="output directory")
    retrieval.add_argument("--ks", help="comma-separated retrieval depths")

    chunking = eval_sub.add_parser("chunking", help="semantic vs recursive chunking comparison")
    chunking.add_argument("--wikiqa", required=True, help="sentence-labeled QA TSV")
    chunking.add_argument("--config", help="path to a YAML config file")
    chunking.add_argument("--out", default="eval_out", help="output directory")
    chunking.add_argument("--ks", help="comma-separated retrieval depths")

    generation = eval_sub.add_parser("generation", help="lexical answer scoring over QA pairs")
    generation.add_argument("--pairs", required=True, help='JSONL rows {"question", "reference"}')
    generation.add_argument("--config", help="path to a YAML config file")
    generation.add_argument("--data-dir", help="data directory override")
    generation.add_argument("--out", default="eval_out", help="output directory")
    return parser


def _load(args, **extra) -> EngineConfig:
    overrides = {k: v for k, v in extra.items() if v is not None}
    return load_config(getattr(args, "config", None), overrides)


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _load(args, data_dir=args.data_dir, **{"service.port": args.port, "service.host": args.host})
    engine = Engine(config)
    app = create_app(engine)
    uvicorn.run(app, host=config.service.host, port=config.service.port, log_level="info")
    return 0


def _cmd_ingest(args) -> int:
    config = _load(args, data_dir=args.data_dir)
    engine = Engine(config)
    record, chunk_count = engine.ingest_file(args.file, fmt=args.format)
    print(
        json.dumps(
            {
                "document_id": record.document_id,
                "file_name": record.file_name,
                "page_count": record.page_count,
                "chunk_count": chunk_count,
            }
        )
    )
    return 0


def _cmd_eval_retrieval(args) -> int:
    config = _load(args)
    from .engine import build_embedder

    embed = build_embedder(config)
    ks = _parse_ks(args.ks) if args.ks else config.eval.ks
    report = run_retrieval_benchmark(
        args.corpus,
        args.queries,
        args.qrels,
        embed,
        ks,
        index_params=config.index.to_params(),
        fingerprint=config.fingerprint(),
    )
    csv_path, json_path = write_reports([report], args.out)
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _cmd_eval_chunking(args) -> int:
    config = _load(args)
    from .engine import build_embedder

    embed = build_embedder(config)
    ks = _parse_ks(args.ks) if args.ks else config.eval.ks
    corpus = build_wikiqa_corpus(parse_wikiqa_tsv(Path(args.wikiqa)))
    configured = config.chunking.to_settings()
    experiments = [
        ChunkingExperiment(
            label=(
                f"semantic_{configured.semantic.method}_{configured.semantic.amount}"
                if configured.mode == "semantic"
                else f"recursive_{configured.recursive.chunk_size}_{configured.recursive.overlap}"
            ),
            settings=configured,
            ks=ks,
        ),
        ChunkingExperiment(
            label="recursive_750_200",
            settings=ChunkerSettings(mode="recursive"),
            ks=ks,
        ),
    ]
    reports = []
    for experiment in experiments:
        reports.append(
            run_chunking_benchmark(
                experiment,
                corpus.stream,
                corpus.qrels,
                embed,
                index_params=config.index.to_params(),
                fingerprint=config.fingerprint(),
                excluded_queries=len(corpus.excluded_question_ids),
            )
        )
    csv_path, json_path = write_reports(reports, args.out)
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _cmd_eval_generation(args) -> int:
    config = _load(args, data_dir=args.data_dir)
    engine = Engine(config)
    pairs = []
    for line in Path(args.pairs).read_text(encoding="utf-8").splitlines():
        if line.strip():
            pairs.append(json.loads(line))
    conversation_id = engine.create_conversation()

    def answer_fn(question: str):
        return engine.answer(conversation_id, question)

    result = run_generation_eval(pairs, answer_fn)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "generation_report.json"
    report_path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {report_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "ingest":
        return _cmd_ingest(args)
    if args.command == "eval":
        if args.eval_kind == "retrieval":
            return _cmd_eval_retrieval(args)
        if args.eval_kind == "chunking":
            return _cmd_eval_chunking(args)
        if args.eval_kind == "generation":
            return _cmd_eval_generation(args)
    raise SystemExit(2)


if __name__ == "__main__":
    sys.exit(main())
