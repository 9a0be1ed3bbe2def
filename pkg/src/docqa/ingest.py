"""Document ingestion: page extraction, document summarization, chunking,
embedding, and persistence.

The document summary feeds the retrieval prompts. It is produced map-reduce
style: pages are grouped into batches of at most ``batch_char_limit``
characters, each batch is summarized, and the joined batch summaries are
summarized once more; a document that fits one batch needs a single call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .chunking import Chunk, RecursiveChunkConfig, SemanticChunkConfig, recursive_chunk, semantic_chunk
from .errors import BackendUnavailable, EmptyDocument, MalformedDocument
from .gateway.base import EmbeddingClient, GenerationClient, GenerationRequest
from .pdftext import extract_page_texts
from .store import (
    ChunkRecord,
    DataStore,
    DocumentRecord,
    content_chunk_id,
    content_document_id,
    now_iso,
)

logger = logging.getLogger(__name__)

SUMMARY_SYSTEM = (
    "Summarize the following document text faithfully and concisely. "
    "Keep key terms, obligations, amounts, and dates. Reply with the summary only."
)
REDUCE_SYSTEM = (
    "Combine the following partial summaries of one document into a single "
    "faithful summary. Reply with the summary only."
)

FORMAT_PDF = "pdf"
FORMAT_PLAIN_TEXT = "plain_text"


@dataclass
class DocumentPage:
    document_id: str
    file_name: str
    page_number: int
    text: str


@dataclass
class ChunkerSettings:
    """Which chunker ingestion runs and with what parameters."""

    mode: str = "semantic"
    semantic: SemanticChunkConfig | None = None
    recursive: RecursiveChunkConfig | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("semantic", "recursive"):
            raise ValueError(f"unknown chunker mode: {self.mode!r}")
        if self.semantic is None:
            self.semantic = SemanticChunkConfig()
        if self.recursive is None:
            self.recursive = RecursiveChunkConfig()


def extract_pages(source: bytes, file_name: str, fmt: str) -> list[DocumentPage]:
    """One DocumentPage per physical page, text stripped; plain text yields a
    single page. Empty pages are retained with empty text, but a document
    with no extractable characters at all raises EmptyDocument."""
    if not source:
        raise EmptyDocument(f"{file_name}: empty input")
    document_id = content_document_id(file_name, source)
    if fmt == FORMAT_PDF:
        texts = extract_page_texts(source)
    elif fmt == FORMAT_PLAIN_TEXT:
        try:
            texts = [source.decode("utf-8")]
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"{file_name}: not valid UTF-8 text") from exc
    else:
        raise ValueError(f"unknown document format: {fmt!r}")
    pages = [
        DocumentPage(
            document_id=document_id,
            file_name=file_name,
            page_number=number,
            text=text.strip(),
        )
        for number, text in enumerate(texts, start=1)
    ]
    if not any(page.text for page in pages):
        raise EmptyDocument(f"{file_name}: no extractable text on any page")
    return pages


def _page_batches(pages: list[DocumentPage], batch_char_limit: int) -> list[str]:
    batches: list[str] = []
    current: list[str] = []
    size = 0
    for page in pages:
        if current and size + len(page.text) > batch_char_limit:
            batches.append("\n".join(current))
            current, size = [], 0
        current.append(page.text)
        size += len(page.text)
    if current:
        batches.append("\n".join(current))
    return batches


def summarize_document(
    pages: list[DocumentPage],
    generator: GenerationClient,
    max_chars: int = 2000,
    batch_char_limit: int = 8000,
) -> tuple[str, bool]:
    """(summary, used_fallback). Falls back to a leading-text excerpt when
    the generation backend is unavailable."""
    if not pages:
        raise ValueError("summarize_document requires at least one page")
    try:
        batches = _page_batches(pages, batch_char_limit)
        partials = [
            generator.generate(GenerationRequest(prompt=batch, system=SUMMARY_SYSTEM))
            for batch in batches
        ]
        if len(partials) == 1:
            summary = partials[0]
        else:
            summary = generator.generate(
                GenerationRequest(prompt="\n\n".join(partials), system=REDUCE_SYSTEM)
            )
        return summary[:max_chars], False
    except BackendUnavailable:
        logger.warning("summary generation backend unavailable; using excerpt fallback")
        joined = "\n".join(page.text for page in pages)
        return joined[:max_chars], True


def chunk_pages(pages: list[DocumentPage], settings: ChunkerSettings, embed: EmbeddingClient) -> list[Chunk]:
    chunks: list[Chunk] = []
    for page in pages:
        if not page.text:
            continue
        if settings.mode == "semantic":
            page_chunks = semantic_chunk(page.text, settings.semantic, embed)
        else:
            page_chunks = recursive_chunk(page.text, settings.recursive)
        for chunk in page_chunks:
            chunk.document_id = page.document_id
            chunk.page_number = page.page_number
            chunk.chunk_index = len(chunks)
            chunk.chunk_id = content_chunk_id(page.document_id, chunk.chunk_index, chunk.text)
            chunks.append(chunk)
    return chunks


def ingest_document(
    source: bytes,
    file_name: str,
    fmt: str,
    store: DataStore,
    embed: EmbeddingClient,
    generator: GenerationClient,
    settings: ChunkerSettings | None = None,
    summary_max_chars: int = 2000,
) -> tuple[DocumentRecord, int]:
    """Extract, summarize, chunk, embed, and persist one document.

    Returns (record, chunk_count). Re-ingesting byte-identical content under
    the same name is a no-op returning the stored record. Nothing becomes
    visible unless the final commit succeeds, so failures before it leave no
    partial document behind.
    """
    settings = settings or ChunkerSettings()
    document_id = content_document_id(file_name, source)
    if store.has_document(document_id):
        record = store.get_document(document_id)
        return record, len(store.chunks_by_document(document_id))

    pages = extract_pages(source, file_name, fmt)
    summary, used_fallback = summarize_document(
        pages, generator, max_chars=summary_max_chars
    )
    chunks = chunk_pages(pages, settings, embed)
    matrix = embed.embed_batch([chunk.text for chunk in chunks])

    record = DocumentRecord(
        document_id=document_id,
        file_name=file_name,
        page_count=len(pages),
        summary=summary,
        ingested_at=now_iso(),
        summary_is_fallback=used_fallback,
    )
    chunk_records = [
        ChunkRecord(
            chunk_id=chunk.chunk_id,
            document_id=chunk.document_id,
            page_number=chunk.page_number,
            chunk_index=chunk.chunk_index,
            text=chunk.text,
            start_offset=chunk.start_offset,
            end_offset=chunk.end_offset,
            embedding_row=-1,
        )
        for chunk in chunks
    ]
    store.commit_document(record, chunk_records, np.asarray(matrix))
    logger.info(
        "ingested %s: %d pages, %d chunks", file_name, len(pages), len(chunk_records)
    )
    return record, len(chunk_records)
