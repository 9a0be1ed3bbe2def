"""Compare semantic and recursive chunking on a QA-labeled corpus.

Builds a synthetic sentence-labeled corpus whose gold answer sentences are
longer than any recursive 750/200 chunk can be, turns it into a continuous
multi-article stream, and sweeps containment-relevance P/R/F1 for both
chunkers. Demonstrates the benchmark direction: sentence-atomic semantic
chunking keeps long gold sentences whole, character splitting severs them.

    python3 demos/02_chunking_benchmark.py
"""

from __future__ import annotations

import random

from docqa.chunking import RecursiveChunkConfig
from docqa.evalharness import ChunkingExperiment, run_chunking_benchmark
from docqa.evalharness.wikiqa import WikiQaRow, build_wikiqa_corpus
from docqa.gateway.stubs import HashedTokenEmbedder
from docqa.ingest import ChunkerSettings

STEMS = [
    "arbor", "basin", "cliff", "dune", "ridge", "marsh", "grove", "stone",
    "creek", "bluff", "field", "shore", "vale", "knoll", "heath", "fen",
]


def build_rows(n_articles: int = 20) -> list[WikiQaRow]:
    rows = []
    rng = random.Random(7)
    for i in range(n_articles):
        code = chr(97 + i // 26) + chr(97 + i % 26)
        words = [f"{stem}{code}" for stem in STEMS]
        title = f"Survey {words[0]} {words[1]}"
        question = f"what does the survey report about {words[2]} {words[3]} {words[4]}"
        fillers = []
        for _ in range(4):
            picks = rng.sample(words, 5)
            fillers.append(" ".join([picks[0].capitalize()] + picks[1:]) + ".")
        body: list[str] = []
        while sum(len(w) + 1 for w in body) < 980:
            body.extend([words[2], words[3], words[4]])
            body.extend(rng.sample(words, 3))
        gold = " ".join(body).capitalize() + "."
        for sentence in fillers[:2] + [gold] + fillers[2:]:
            rows.append(
                WikiQaRow(
                    question_id=f"Q{i:03d}",
                    question=question,
                    document_title=title,
                    sentence=sentence,
                    label=1 if sentence is gold else 0,
                )
            )
    return rows


def main() -> None:
    corpus = build_wikiqa_corpus(build_rows())
    embedder = HashedTokenEmbedder()
    ks = [1, 3, 5]

    experiments = [
        ChunkingExperiment(
            label="semantic_std_1.0",
            settings=ChunkerSettings(mode="semantic"),
            ks=ks,
        ),
        ChunkingExperiment(
            label="recursive_750_200",
            settings=ChunkerSettings(
                mode="recursive",
                recursive=RecursiveChunkConfig(chunk_size=750, overlap=200),
            ),
            ks=ks,
        ),
    ]

    print(f"{len(corpus.qrels.queries)} judged questions, stream length {len(corpus.stream)} chars\n")
    print(f"{'config':<20} {'k':>3} {'precision':>10} {'recall':>8} {'f1':>8}")
    for experiment in experiments:
        report = run_chunking_benchmark(experiment, corpus.stream, corpus.qrels, embedder)
        for k in ks:
            stats = report.per_k[k]
            print(
                f"{report.config_label:<20} {k:>3} "
                f"{stats['precision']:>10.3f} {stats['recall']:>8.3f} {stats['f1']:>8.3f}"
            )
    print(
        "\nEvery gold sentence exceeds the 950-char maximum span of a recursive"
        "\n750/200 chunk, so recursive recall is structurally zero here while the"
        "\nsentence-atomic semantic chunker keeps each gold sentence intact."
    )


if __name__ == "__main__":
    main()
