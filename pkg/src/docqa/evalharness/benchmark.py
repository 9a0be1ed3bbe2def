"""Benchmark runners: retrieval depth sweeps over document corpora, the
chunking comparison over a QA-derived stream, and lexical generation
scoring. Each run builds a fresh private index so configurations never
contaminate each other."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..chunking import recursive_chunk, semantic_chunk
from ..errors import FormatError
from ..gateway.base import EmbeddingClient
from ..hnsw import HnswIndex, HnswParams
from ..ingest import ChunkerSettings
from .metrics import bleu, precision_recall_f1_at_k, refusal_rate, rouge_l
from .wikiqa import QrelSet, is_relevant_containment

CSV_HEADER = "config,k,precision,recall,f1,num_queries"

# Columns reserved for metrics that need external pretrained resources and
# therefore stay null in this harness.
RESERVED_METRICS = {"meteor": None, "bert_precision": None, "bert_recall": None, "similarity": None}


@dataclass
class MetricReport:
    config_label: str
    config_fingerprint: str = ""
    ks: list[int] = field(default_factory=list)
    per_k: dict[int, dict[str, float]] = field(default_factory=dict)
    per_query: dict[str, dict[int, tuple[float, float, float]]] = field(default_factory=dict)
    num_queries: int = 0
    excluded_queries: int = 0
    notes: list[str] = field(default_factory=lambda: [
        "macro-averaged over queries",
        "precision@k uses denominator k even when fewer results exist",
    ])

    def csv_rows(self) -> list[str]:
        rows = [CSV_HEADER]
        for k in self.ks:
            stats = self.per_k[k]
            rows.append(
                f"{self.config_label},{k},{stats['precision']:.6f},"
                f"{stats['recall']:.6f},{stats['f1']:.6f},{self.num_queries}"
            )
        return rows

    def to_dict(self) -> dict:
        return {
            "config": self.config_label,
            "config_fingerprint": self.config_fingerprint,
            "ks": self.ks,
            "per_k": {str(k): self.per_k[k] for k in self.ks},
            "num_queries": self.num_queries,
            "excluded_queries": self.excluded_queries,
            "notes": self.notes,
            **RESERVED_METRICS,
        }


@dataclass
class ChunkingExperiment:
    label: str
    settings: ChunkerSettings
    ks: list[int]
    corpus_path: str = ""

    def __post_init__(self) -> None:
        self.ks = sorted(set(self.ks))
        if not self.ks or self.ks[0] < 1:
            raise ValueError("k values must be positive")


def _macro_report(
    label: str,
    ks: list[int],
    per_query: dict[str, dict[int, tuple[float, float, float]]],
    excluded: int,
    fingerprint: str,
) -> MetricReport:
    report = MetricReport(
        config_label=label,
        config_fingerprint=fingerprint,
        ks=sorted(set(ks)),
        per_query=per_query,
        num_queries=len(per_query),
        excluded_queries=excluded,
    )
    for k in report.ks:
        if per_query:
            triples = [per_query[qid][k] for qid in per_query]
            report.per_k[k] = {
                "precision": sum(t[0] for t in triples) / len(triples),
                "recall": sum(t[1] for t in triples) / len(triples),
                "f1": sum(t[2] for t in triples) / len(triples),
            }
        else:
            report.per_k[k] = {"precision": 0.0, "recall": 0.0, "f1": 0.0}
    return report


def _build_index(ids: list[str], vectors, params: HnswParams | None) -> HnswIndex:
    index = HnswIndex(params or HnswParams())
    for chunk_id, vector in zip(ids, vectors):
        index.insert(chunk_id, vector)
    return index


def run_chunking_benchmark(
    experiment: ChunkingExperiment,
    stream: str,
    qrels: QrelSet,
    embed: EmbeddingClient,
    index_params: HnswParams | None = None,
    fingerprint: str = "",
    excluded_queries: int = 0,
) -> MetricReport:
    """Chunk the stream with the experiment's chunker, index the chunks, and
    sweep containment-relevance P/R/F1 over the judged questions.

    A question whose gold sentence was severed by the chunker (no chunk
    contains it completely) scores zero at every depth and stays counted;
    only questions that never had a positive label are excluded upstream.
    """
    if qrels.mode != "containment":
        raise ValueError("chunking benchmark expects containment-mode qrels")
    settings = experiment.settings
    if settings.mode == "semantic":
        chunks = semantic_chunk(stream, settings.semantic, embed)
    else:
        chunks = recursive_chunk(stream, settings.recursive)
    ids = [f"chunk_{i:06d}" for i in range(len(chunks))]
    texts = [chunk.text for chunk in chunks]
    vectors = embed.embed_batch(texts)
    index = _build_index(ids, vectors, index_params)

    max_k = max(experiment.ks)
    ef = max(index.params.ef_search, max_k)
    per_query: dict[str, dict[int, tuple[float, float, float]]] = {}
    for query in qrels.queries:
        qid = query["query_id"]
        golds = qrels.judgments[qid]
        relevant = {
            cid
            for cid, text in zip(ids, texts)
            if any(is_relevant_containment(text, gold) for gold in golds)
        }
        hits = index.search_knn(embed.embed_one(query["text"]), max_k, ef_search=ef)
        retrieved = [hit.chunk_id for hit in hits]
        per_query[qid] = {}
        for k in experiment.ks:
            if relevant:
                per_query[qid][k] = precision_recall_f1_at_k(retrieved, relevant, k)
            else:
                per_query[qid][k] = (0.0, 0.0, 0.0)
    return _macro_report(experiment.label, experiment.ks, per_query, excluded_queries, fingerprint)


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except ValueError as exc:
            raise FormatError(f"{path}:{line_no}: invalid JSON") from exc
    return records


def read_beir_corpus(path: str | Path) -> list[tuple[str, str]]:
    """corpus.jsonl rows {_id, title, text} -> (doc_id, embeddable text)."""
    docs = []
    for record in _read_jsonl(Path(path)):
        if "_id" not in record or "text" not in record:
            raise FormatError(f"{path}: corpus rows need _id and text")
        title = record.get("title", "")
        body = record["text"]
        docs.append((str(record["_id"]), f"{title}\n{body}" if title else body))
    return docs


def read_beir_queries(path: str | Path) -> list[tuple[str, str]]:
    queries = []
    for record in _read_jsonl(Path(path)):
        if "_id" not in record or "text" not in record:
            raise FormatError(f"{path}: query rows need _id and text")
        queries.append((str(record["_id"]), record["text"]))
    return queries


def read_beir_qrels(path: str | Path) -> dict[str, set[str]]:
    """TSV lines "query-id<TAB>doc-id<TAB>score"; positive score means
    relevant. A header line is detected and skipped."""
    judgments: dict[str, set[str]] = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) < 3:
            raise FormatError(f"{path}:{line_no}: expected 3 tab-separated columns")
        if line_no == 1 and not cells[2].strip().lstrip("+-").replace(".", "", 1).isdigit():
            continue
        try:
            score = float(cells[2])
        except ValueError as exc:
            raise FormatError(f"{path}:{line_no}: score must be numeric") from exc
        if score > 0:
            judgments.setdefault(cells[0].strip(), set()).add(cells[1].strip())
    return judgments


def run_retrieval_benchmark(
    corpus_path: str | Path,
    queries_path: str | Path,
    qrels_path: str | Path,
    embed: EmbeddingClient,
    ks: list[int],
    index_params: HnswParams | None = None,
    config_label: str = "retrieval",
    fingerprint: str = "",
) -> MetricReport:
    """Embed and index a document corpus, sweep the queries, and score
    doc-id relevance at each depth. Queries without judgments are excluded
    and counted."""
    ks = sorted(set(ks))
    docs = read_beir_corpus(corpus_path)
    queries = read_beir_queries(queries_path)
    judgments = read_beir_qrels(qrels_path)

    ids = [doc_id for doc_id, _ in docs]
    vectors = embed.embed_batch([text for _, text in docs])
    index = _build_index(ids, vectors, index_params)

    max_k = max(ks)
    ef = max(index.params.ef_search, max_k)
    per_query: dict[str, dict[int, tuple[float, float, float]]] = {}
    excluded = 0
    for qid, text in queries:
        relevant = judgments.get(qid, set())
        if not relevant:
            excluded += 1
            continue
        hits = index.search_knn(embed.embed_one(text), max_k, ef_search=ef)
        retrieved = [hit.chunk_id for hit in hits]
        per_query[qid] = {
            k: precision_recall_f1_at_k(retrieved, relevant, k) for k in ks
        }
    return _macro_report(config_label, ks, per_query, excluded, fingerprint)


def run_generation_eval(pairs: list[dict], answer_fn) -> dict:
    """Score answers against references: mean ROUGE-L, mean BLEU, and the
    refusal rate. ``pairs`` rows are {"question", "reference"}; answer_fn
    maps a question string to an Answer."""
    if not pairs:
        raise ValueError("generation eval needs at least one pair")
    rows = []
    for pair in pairs:
        answer = answer_fn(pair["question"])
        rows.append(
            {
                "question": pair["question"],
                "reference": pair["reference"],
                "answer": answer.text,
                "insufficient_context": answer.insufficient_context,
                "rouge_l": rouge_l(answer.text, pair["reference"]),
                "bleu": bleu(answer.text, pair["reference"]),
            }
        )
    n = len(rows)
    return {
        "rouge_l_f": sum(r["rouge_l"]["f"] for r in rows) / n,
        "bleu": sum(r["bleu"] for r in rows) / n,
        "refusal_rate": refusal_rate([r["insufficient_context"] for r in rows]),
        "num_questions": n,
        "per_question": rows,
        **RESERVED_METRICS,
    }


def write_reports(reports: list[MetricReport], out_dir: str | Path) -> tuple[Path, Path]:
    """Write metrics.csv (one row per config and k) and report.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_lines = [CSV_HEADER]
    for report in reports:
        csv_lines.extend(report.csv_rows()[1:])
    csv_path = out / "metrics.csv"
    csv_path.write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    json_path = out / "report.json"
    json_path.write_text(
        json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return csv_path, json_path
