"""Question-answer corpus transformation for the chunking benchmark.

Sentence-labeled QA rows become one document per article title (title line
plus the article's sentences joined by single spaces), concatenated in first-
appearance order into one continuous multi-article stream with a blank line
between articles. Gold answers stay verbatim at the sentence level, and
relevance of a chunk is strict containment of a complete gold sentence.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FormatError, MissingLabel

_COLUMNS = ("question_id", "question", "document_title", "sentence", "label")


@dataclass
class WikiQaRow:
    question_id: str
    question: str
    document_title: str
    sentence: str
    label: int


@dataclass
class QrelSet:
    """Queries plus their relevance judgments; judgments map query_id to a
    set of doc/chunk ids, or to gold sentences in containment mode."""

    queries: list[dict] = field(default_factory=list)
    judgments: dict[str, set[str]] = field(default_factory=dict)
    mode: str = "doc_id"


@dataclass
class WikiQaCorpus:
    stream: str
    documents: list[tuple[str, str]]
    qrels: QrelSet
    excluded_question_ids: list[str] = field(default_factory=list)


def parse_wikiqa_tsv(source: str | Path) -> list[WikiQaRow]:
    """Read tab-separated rows (question_id, question, document_title,
    sentence, label); a header row is detected and skipped."""
    text = Path(source).read_text(encoding="utf-8") if isinstance(source, Path) else source
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    rows: list[WikiQaRow] = []
    for line_no, cells in enumerate(reader, start=1):
        if not cells or all(not cell.strip() for cell in cells):
            continue
        if len(cells) < 5:
            raise FormatError(f"line {line_no}: expected 5 tab-separated columns")
        if line_no == 1 and cells[4].strip().lower() == "label":
            continue
        label_text = cells[4].strip()
        if label_text not in ("0", "1"):
            raise MissingLabel(f"line {line_no}: label must be 0 or 1, got {label_text!r}")
        rows.append(
            WikiQaRow(
                question_id=cells[0].strip(),
                question=cells[1].strip(),
                document_title=cells[2].strip(),
                sentence=cells[3].strip(),
                label=int(label_text),
            )
        )
    return rows


def build_wikiqa_corpus(rows: list[WikiQaRow]) -> WikiQaCorpus:
    """Continuous multi-article stream plus containment-mode relevance.

    Questions without any positively labeled sentence are excluded from the
    judged set and reported via excluded_question_ids.
    """
    if not rows:
        raise FormatError("no rows to build a corpus from")

    title_order: list[str] = []
    sentences_by_title: dict[str, list[str]] = {}
    for row in rows:
        if row.document_title not in sentences_by_title:
            title_order.append(row.document_title)
            sentences_by_title[row.document_title] = []
        sentences_by_title[row.document_title].append(row.sentence)

    documents = [
        (title, f"{title}\n" + " ".join(sentences_by_title[title]))
        for title in title_order
    ]
    stream = "\n\n".join(text for _, text in documents)

    question_order: list[str] = []
    question_text: dict[str, str] = {}
    gold: dict[str, set[str]] = {}
    for row in rows:
        if row.question_id not in question_text:
            question_order.append(row.question_id)
            question_text[row.question_id] = row.question
            gold[row.question_id] = set()
        if row.label == 1:
            gold[row.question_id].add(row.sentence)

    qrels = QrelSet(mode="containment")
    excluded: list[str] = []
    for qid in question_order:
        if gold[qid]:
            qrels.queries.append({"query_id": qid, "text": question_text[qid]})
            qrels.judgments[qid] = gold[qid]
        else:
            excluded.append(qid)
    return WikiQaCorpus(
        stream=stream, documents=documents, qrels=qrels, excluded_question_ids=excluded
    )


def _normalize(text: str) -> str:
    return " ".join(text.split()).lower()


def is_relevant_containment(chunk_text: str, gold_sentence: str) -> bool:
    """True only when the whole gold sentence appears inside the chunk,
    after whitespace normalization and case folding; partial overlap does
    not count."""
    gold = _normalize(gold_sentence)
    if not gold:
        return False
    return gold in _normalize(chunk_text)
