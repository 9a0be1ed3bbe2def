"""Shared fixtures: deterministic corpora, PDF builders, and engine factories.

The topic-block corpus is constructed so the hashed embedder gives cosine 1
within a block (identical word bags) and cosine 0 across blocks (the token
buckets are pairwise disjoint, asserted below), which makes the consecutive
distance profile exactly [0,0,0,1,0,0,0,1,0,0,0].
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import pytest

from docqa.config import load_config
from docqa.engine import Engine
from docqa.evalharness.wikiqa import WikiQaCorpus, WikiQaRow, build_wikiqa_corpus
from docqa.gateway.stubs import HashedTokenEmbedder, ScriptedGenerator, fnv1a_64

BLOCK_VOCAB = [
    (["alpha", "beacon", "cradle"], "anchor."),
    (["delta", "ember", "fjord"], "garnet."),
    (["harbor", "ingot", "jasper"], "kelp."),
]

BENCHMARK_STEMS = [
    "arbor", "basin", "cliff", "delta", "ridge", "marsh", "grove", "stone",
    "creek", "bluff", "field", "shore", "vale", "knoll", "heath", "fen",
]


@dataclass
class BlockCorpus:
    text: str
    sentences: list[str]
    planted_boundaries: set[int] = field(default_factory=lambda: {3, 7})
    block_size: int = 4


def _block_sentences(words: list[str], last: str) -> list[str]:
    orders = [
        [words[0], words[1], words[2]],
        [words[1], words[2], words[0]],
        [words[2], words[0], words[1]],
        [words[1], words[0], words[2]],
    ]
    out = []
    for order in orders:
        out.append(" ".join([order[0].capitalize(), order[1], order[2], last]))
    return out


def build_block_corpus(dim: int = 256) -> BlockCorpus:
    """Three 4-sentence topic blocks; bags identical within a block, token
    buckets disjoint across blocks, so distances are exactly 0 or 1."""
    bucket_sets = []
    for words, last in BLOCK_VOCAB:
        buckets = {fnv1a_64(w.lower()) % dim for w in words + [last]}
        assert len(buckets) == len(words) + 1
        bucket_sets.append(buckets)
    for i in range(len(bucket_sets)):
        for j in range(i + 1, len(bucket_sets)):
            assert not (bucket_sets[i] & bucket_sets[j]), "vocabulary collides"
    sentences = []
    for words, last in BLOCK_VOCAB:
        sentences.extend(_block_sentences(words, last))
    return BlockCorpus(text=" ".join(sentences), sentences=sentences)


def _article_words(i: int) -> list[str]:
    code = chr(97 + i // 26) + chr(97 + i % 26)
    return [f"{stem}{code}" for stem in BENCHMARK_STEMS]


def build_benchmark_rows(n_articles: int = 50, gold_min_chars: int = 980) -> list[WikiQaRow]:
    """Vocabulary-disjoint articles whose single gold sentence is longer than
    any recursive 750/200 chunk can be, so character splitting always severs
    it while sentence-atomic chunking never does."""
    rows = []
    rng = random.Random(13)
    for i in range(n_articles):
        words = _article_words(i)
        title = f"Report {words[0]} {words[1]}"
        qid = f"Q{i:03d}"
        question = f"what does the record say about {words[2]} {words[3]} {words[4]}"
        fillers = []
        for _ in range(4):
            picks = rng.sample(words, 5)
            fillers.append(" ".join([picks[0].capitalize()] + picks[1:]) + ".")
        core = [words[2], words[3], words[4]]
        body: list[str] = []
        while sum(len(w) + 1 for w in body) < gold_min_chars:
            body.extend(core)
            body.extend(rng.sample(words, 3))
        gold = " ".join(body).capitalize() + "."
        assert len(gold) > 950
        sentences = fillers[:2] + [gold] + fillers[2:]
        for sentence in sentences:
            rows.append(
                WikiQaRow(
                    question_id=qid,
                    question=question,
                    document_title=title,
                    sentence=sentence,
                    label=1 if sentence is gold else 0,
                )
            )
    return rows


@pytest.fixture(autouse=True)
def _isolate_engine_env(monkeypatch):
    for name in ("ENGINE_CONFIG", "ENGINE_DATA_DIR", "ENGINE_PORT"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def embedder() -> HashedTokenEmbedder:
    return HashedTokenEmbedder()


@pytest.fixture
def block_corpus() -> BlockCorpus:
    return build_block_corpus()


@pytest.fixture(scope="session")
def benchmark_corpus() -> WikiQaCorpus:
    return build_wikiqa_corpus(build_benchmark_rows())


def make_pdf(pages: list[str]) -> bytes:
    """Build a real multi-page PDF with one text line block per page."""
    import io

    from reportlab.lib.pagesizes import letter
    from reportlab.pdfgen import canvas

    buffer = io.BytesIO()
    pdf = canvas.Canvas(buffer, pagesize=letter)
    for page_text in pages:
        y = 720
        for line in page_text.splitlines():
            pdf.drawString(72, y, line)
            y -= 18
        pdf.showPage()
    pdf.save()
    return buffer.getvalue()


@pytest.fixture
def pdf_builder():
    return make_pdf


SOLAR_TEXT = (
    "The solar credit program started in 2020. "
    "Households get 30 percent back. "
    "Applications are filed online."
)
WIND_TEXT = (
    "Wind turbines convert kinetic energy. "
    "Offshore farms produce more power. "
    "Maintenance happens quarterly."
)


def scripted_engine(tmp_path, rules=None, **config_overrides) -> Engine:
    """Engine on a temp data dir with hashed embeddings and a scripted
    generator (refusal rule first so history text cannot shadow it)."""
    overrides = {"data_dir": str(tmp_path / "data")}
    overrides.update(config_overrides)
    config = load_config(None, overrides)
    generator = ScriptedGenerator(
        rules=rules
        if rules is not None
        else [
            ("moon", "not enough context"),
            ("solar", "Per [1], 'Households get 30 percent back.'"),
            ("wind", "Per [1], 'Maintenance happens quarterly.'"),
        ]
    )
    return Engine(config, generator=generator)


@pytest.fixture
def engine_factory(tmp_path):
    def factory(rules=None, **config_overrides) -> Engine:
        return scripted_engine(tmp_path, rules=rules, **config_overrides)

    return factory
