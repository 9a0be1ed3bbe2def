from .benchmark import (
    CSV_HEADER,
    ChunkingExperiment,
    MetricReport,
    read_beir_corpus,
    read_beir_qrels,
    read_beir_queries,
    run_chunking_benchmark,
    run_generation_eval,
    run_retrieval_benchmark,
    write_reports,
)
from .metrics import (
    BLEU_EPSILON,
    bleu,
    lcs_length,
    precision_recall_f1_at_k,
    refusal_rate,
    rouge_l,
    tokenize,
)
from .wikiqa import (
    QrelSet,
    WikiQaCorpus,
    WikiQaRow,
    build_wikiqa_corpus,
    is_relevant_containment,
    parse_wikiqa_tsv,
)

__all__ = [
    "CSV_HEADER",
    "ChunkingExperiment",
    "MetricReport",
    "read_beir_corpus",
    "read_beir_qrels",
    "read_beir_queries",
    "run_chunking_benchmark",
    "run_generation_eval",
    "run_retrieval_benchmark",
    "write_reports",
    "BLEU_EPSILON",
    "bleu",
    "lcs_length",
    "precision_recall_f1_at_k",
    "refusal_rate",
    "rouge_l",
    "tokenize",
    "QrelSet",
    "WikiQaCorpus",
    "WikiQaRow",
    "build_wikiqa_corpus",
    "is_relevant_containment",
    "parse_wikiqa_tsv",
]
