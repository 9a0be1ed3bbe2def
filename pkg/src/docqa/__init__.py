"""Document-grounded question answering engine.

Ingests PDF and plain-text documents, chunks them (semantic or recursive),
indexes chunk embeddings in a small-world graph, retrieves context through a
multi-stage pipeline, and answers questions strictly from retrieved excerpts.
"""

from __future__ import annotations

from .chunking import (
    Chunk,
    RecursiveChunkConfig,
    SemanticChunkConfig,
    SentenceSpan,
    compute_breakpoints,
    recursive_chunk,
    semantic_chunk,
    split_sentences,
)
from .config import EngineConfig, load_config
from .engine import Engine
from .errors import (
    BackendUnavailable,
    ContextOverflow,
    CorruptFile,
    DimensionMismatch,
    DuplicateId,
    EmptyCandidates,
    EmptyDocument,
    EmptyIndex,
    EngineError,
    FormatError,
    FormatVersionMismatch,
    MalformedDocument,
    MissingLabel,
    NotFound,
    ZeroVector,
)
from .generation import Answer, Citation, GenerationConfig, detect_refusal
from .hnsw import HnswIndex, HnswParams, SearchHit, cosine_similarity
from .ingest import ChunkerSettings, extract_pages, ingest_document
from .retrieval import RetrievalConfig, RetrievalTrace, retrieve_pipeline, rrf_fuse, top_p_filter
from .store import ChunkRecord, ConversationTurn, DataStore, DocumentRecord

__all__ = [
    "Answer",
    "BackendUnavailable",
    "ChunkRecord",
    "ChunkerSettings",
    "Citation",
    "ContextOverflow",
    "ConversationTurn",
    "CorruptFile",
    "DataStore",
    "DimensionMismatch",
    "DocumentRecord",
    "DuplicateId",
    "EmptyCandidates",
    "EmptyDocument",
    "EmptyIndex",
    "Engine",
    "EngineConfig",
    "EngineError",
    "FormatError",
    "FormatVersionMismatch",
    "GenerationConfig",
    "HnswIndex",
    "HnswParams",
    "MalformedDocument",
    "Chunk",
    "MissingLabel",
    "NotFound",
    "RecursiveChunkConfig",
    "RetrievalConfig",
    "RetrievalTrace",
    "SearchHit",
    "SemanticChunkConfig",
    "SentenceSpan",
    "ZeroVector",
    "compute_breakpoints",
    "cosine_similarity",
    "detect_refusal",
    "extract_pages",
    "ingest_document",
    "load_config",
    "recursive_chunk",
    "retrieve_pipeline",
    "rrf_fuse",
    "semantic_chunk",
    "split_sentences",
    "top_p_filter",
]

__version__ = "0.1.0"
