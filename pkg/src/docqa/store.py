"""Durable persistence for documents, chunks, embeddings, conversations, and
the vector index.

Layout under one data directory:

    documents.jsonl       one record per ingested document
    chunks.jsonl          one record per chunk, embedding_row points into the matrix
    embeddings.f32        flat little-endian float32 matrix, row-aligned with chunks
    embeddings.meta.json  {dim, count, model}
    index.hnsw            serialized vector index
    conversations.jsonl   conversation-created and turn records, append-only

Appends are flushed and fsynced; rewrites go through a temp file and an
atomic rename. On reopen, a partial trailing line (interrupted append) is
discarded, so every previously committed record survives a crash.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import CorruptFile, DuplicateId, NotFound
from .hnsw import HnswIndex, HnswParams

_F32 = np.dtype("<f4")


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def content_document_id(file_name: str, content: bytes) -> str:
    digest = hashlib.sha256(file_name.encode("utf-8") + b"\x1f" + content)
    return digest.hexdigest()[:32]


def content_chunk_id(document_id: str, chunk_index: int, text: str) -> str:
    payload = f"{document_id}\x1f{chunk_index}\x1f{text}".encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:32]


@dataclass
class DocumentRecord:
    document_id: str
    file_name: str
    page_count: int
    summary: str
    ingested_at: str = ""
    summary_is_fallback: bool = False


@dataclass
class ChunkRecord:
    chunk_id: str
    document_id: str
    page_number: int
    chunk_index: int
    text: str
    start_offset: int
    end_offset: int
    embedding_row: int


@dataclass
class ConversationTurn:
    turn_index: int
    question: str
    answer: str
    insufficient_context: bool
    citation_chunk_ids: list[str] = field(default_factory=list)
    created_at: str = ""


def _append_jsonl(path: Path, record: dict) -> None:
    line = json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


def _read_jsonl(path: Path) -> list[dict]:
    """Parse a JSON-lines file, dropping a partial trailing line.

    A malformed line anywhere except the tail means real corruption and
    raises; a malformed or newline-less tail is the residue of an
    interrupted append and is discarded.
    """
    if not path.exists():
        return []
    raw = path.read_bytes()
    if not raw:
        return []
    records: list[dict] = []
    lines = raw.split(b"\n")
    trailing = lines.pop()  # b"" when the file ends with a newline
    for pos, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line.decode("utf-8")))
        except (ValueError, UnicodeDecodeError) as exc:
            if pos == len(lines) - 1 and not trailing.strip():
                break  # interrupted append that still got its newline out
            raise CorruptFile(f"{path}: malformed record at line {pos + 1}") from exc
    if trailing.strip():
        try:
            records.append(json.loads(trailing.decode("utf-8")))
        except (ValueError, UnicodeDecodeError):
            pass  # interrupted append without a newline
    return records


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class DataStore:
    """Single-writer store; reads return committed state. All mutating and
    reading methods take one internal lock, so a store instance is safe to
    share across request-handler threads."""

    def __init__(self, data_dir: str | Path, index_params: HnswParams | None = None,
                 embed_model: str = ""):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._index_params = index_params or HnswParams()
        self._embed_model = embed_model

        self._documents: dict[str, DocumentRecord] = {}
        self._chunks: dict[str, ChunkRecord] = {}
        self._doc_chunks: dict[str, list[str]] = {}
        self._conversations: dict[str, dict] = {}
        self._dim = 0
        self._matrix = np.zeros((0, 0), dtype=_F32)
        self._index: HnswIndex | None = None
        self._load()

    # -- paths ---------------------------------------------------------------

    @property
    def documents_path(self) -> Path:
        return self.data_dir / "documents.jsonl"

    @property
    def chunks_path(self) -> Path:
        return self.data_dir / "chunks.jsonl"

    @property
    def embeddings_path(self) -> Path:
        return self.data_dir / "embeddings.f32"

    @property
    def embeddings_meta_path(self) -> Path:
        return self.data_dir / "embeddings.meta.json"

    @property
    def index_path(self) -> Path:
        return self.data_dir / "index.hnsw"

    @property
    def conversations_path(self) -> Path:
        return self.data_dir / "conversations.jsonl"

    # -- load ----------------------------------------------------------------

    def _load(self) -> None:
        for rec in _read_jsonl(self.documents_path):
            doc = DocumentRecord(**rec)
            self._documents[doc.document_id] = doc
            self._doc_chunks.setdefault(doc.document_id, [])

        meta = {}
        if self.embeddings_meta_path.exists():
            meta = json.loads(self.embeddings_meta_path.read_text(encoding="utf-8"))
        self._dim = int(meta.get("dim", 0))
        count = int(meta.get("count", 0))
        self._embed_model = meta.get("model", self._embed_model)
        if count and self._dim:
            raw = self.embeddings_path.read_bytes()
            need = count * self._dim * 4
            if len(raw) < need:
                raise CorruptFile(
                    f"{self.embeddings_path}: matrix shorter than recorded count"
                )
            # Bytes beyond count rows are an interrupted append; ignore them.
            self._matrix = np.frombuffer(raw[:need], dtype=_F32).reshape(count, self._dim).copy()
        else:
            self._matrix = np.zeros((0, self._dim), dtype=_F32) if self._dim else np.zeros((0, 0), _F32)

        committed_rows = self._matrix.shape[0]
        orphans = False
        for rec in _read_jsonl(self.chunks_path):
            chunk = ChunkRecord(**rec)
            # Chunks whose document record never committed, or whose
            # embedding row is beyond the committed matrix, are rollback
            # residue from an interrupted ingest.
            if chunk.document_id not in self._documents or chunk.embedding_row >= committed_rows:
                orphans = True
                continue
            self._chunks[chunk.chunk_id] = chunk
            self._doc_chunks.setdefault(chunk.document_id, []).append(chunk.chunk_id)
        for ids in self._doc_chunks.values():
            ids.sort(key=lambda cid: self._chunks[cid].chunk_index)
        if orphans:
            self._rewrite_chunk_files()

        for rec in _read_jsonl(self.conversations_path):
            kind = rec.get("kind")
            if kind == "conversation":
                self._conversations[rec["conversation_id"]] = {
                    "created_at": rec.get("created_at", ""),
                    "turns": [],
                }
            elif kind == "turn":
                conv = self._conversations.get(rec["conversation_id"])
                if conv is None:
                    continue
                payload = {k: v for k, v in rec.items() if k not in ("kind", "conversation_id")}
                conv["turns"].append(ConversationTurn(**payload))

    # -- documents -----------------------------------------------------------

    def has_document(self, document_id: str) -> bool:
        with self._lock:
            return document_id in self._documents

    def get_document(self, document_id: str) -> DocumentRecord:
        with self._lock:
            doc = self._documents.get(document_id)
            if doc is None:
                raise NotFound(f"document not found: {document_id}")
            return doc

    def list_documents(self) -> list[DocumentRecord]:
        with self._lock:
            return sorted(self._documents.values(), key=lambda d: (d.ingested_at, d.document_id))

    def commit_document(
        self,
        document: DocumentRecord,
        chunks: list[ChunkRecord],
        embeddings: np.ndarray,
    ) -> None:
        """Persist one ingested document with its chunks and embedding rows.

        Write order makes the document record the commit point: embedding
        rows, then matrix metadata, then chunk records, then the document
        record. A crash before the final append leaves residue that _load
        discards, never a half-visible document.
        """
        with self._lock:
            if document.document_id in self._documents:
                raise DuplicateId(f"document already stored: {document.document_id}")
            embeddings = np.asarray(embeddings, dtype=np.float64)
            if embeddings.ndim != 2 or embeddings.shape[0] != len(chunks):
                raise ValueError("one embedding row per chunk required")
            if self._dim == 0 and embeddings.size:
                self._dim = int(embeddings.shape[1])
                self._matrix = np.zeros((0, self._dim), dtype=_F32)
            if embeddings.size and embeddings.shape[1] != self._dim:
                raise ValueError(
                    f"embedding dimension {embeddings.shape[1]} != store dimension {self._dim}"
                )
            base = self._matrix.shape[0]
            for offset, chunk in enumerate(chunks):
                chunk.embedding_row = base + offset

            rows32 = embeddings.astype(_F32)
            with open(self.embeddings_path, "ab") as fh:
                fh.write(rows32.tobytes())
                fh.flush()
                os.fsync(fh.fileno())
            self._matrix = np.concatenate([self._matrix, rows32], axis=0)
            self._write_embeddings_meta()

            for chunk in chunks:
                _append_jsonl(self.chunks_path, asdict(chunk))
            _append_jsonl(self.documents_path, asdict(document))

            self._documents[document.document_id] = document
            self._doc_chunks[document.document_id] = [c.chunk_id for c in chunks]
            for chunk in chunks:
                self._chunks[chunk.chunk_id] = chunk
            if self._index is not None:
                for chunk in chunks:
                    self._index.insert(chunk.chunk_id, self._matrix[chunk.embedding_row])
                self.save_index()

    def delete_document(self, document_id: str) -> None:
        """Remove a document, its chunks, and its embedding rows, then
        rebuild the index over what remains."""
        with self._lock:
            if document_id not in self._documents:
                raise NotFound(f"document not found: {document_id}")
            del self._documents[document_id]
            for cid in self._doc_chunks.pop(document_id, []):
                self._chunks.pop(cid, None)

            survivors = sorted(self._chunks.values(), key=lambda c: c.embedding_row)
            old_matrix = self._matrix
            new_matrix = np.zeros((len(survivors), self._dim), dtype=_F32)
            for new_row, chunk in enumerate(survivors):
                new_matrix[new_row] = old_matrix[chunk.embedding_row]
                chunk.embedding_row = new_row
            self._matrix = new_matrix

            _atomic_write(self.embeddings_path, new_matrix.tobytes())
            self._write_embeddings_meta()
            self._rewrite_chunk_files()
            docs = sorted(self._documents.values(), key=lambda d: (d.ingested_at, d.document_id))
            payload = "".join(
                json.dumps(asdict(d), ensure_ascii=False, sort_keys=True) + "\n" for d in docs
            )
            _atomic_write(self.documents_path, payload.encode("utf-8"))

            self._index = None
            self.rebuild_index()
            self.save_index()

    def _rewrite_chunk_files(self) -> None:
        chunks = sorted(self._chunks.values(), key=lambda c: c.embedding_row)
        payload = "".join(
            json.dumps(asdict(c), ensure_ascii=False, sort_keys=True) + "\n" for c in chunks
        )
        _atomic_write(self.chunks_path, payload.encode("utf-8"))

    def _write_embeddings_meta(self) -> None:
        meta = {"dim": self._dim, "count": int(self._matrix.shape[0]), "model": self._embed_model}
        _atomic_write(self.embeddings_meta_path, json.dumps(meta, sort_keys=True).encode("utf-8"))

    # -- chunks ---------------------------------------------------------------

    def get_chunk(self, chunk_id: str) -> ChunkRecord:
        with self._lock:
            chunk = self._chunks.get(chunk_id)
            if chunk is None:
                raise NotFound(f"chunk not found: {chunk_id}")
            return chunk

    def chunks_by_document(self, document_id: str) -> list[ChunkRecord]:
        with self._lock:
            if document_id not in self._documents:
                raise NotFound(f"document not found: {document_id}")
            return [self._chunks[cid] for cid in self._doc_chunks.get(document_id, [])]

    def chunk_count(self) -> int:
        with self._lock:
            return len(self._chunks)

    def embedding_for_chunk(self, chunk_id: str) -> np.ndarray:
        with self._lock:
            chunk = self.get_chunk(chunk_id)
            return np.array(self._matrix[chunk.embedding_row], dtype=np.float32)

    # -- conversations ---------------------------------------------------------

    def create_conversation(self, conversation_id: str | None = None) -> str:
        with self._lock:
            cid = conversation_id or uuid.uuid4().hex
            if cid in self._conversations:
                raise DuplicateId(f"conversation exists: {cid}")
            created = now_iso()
            _append_jsonl(
                self.conversations_path,
                {"kind": "conversation", "conversation_id": cid, "created_at": created},
            )
            self._conversations[cid] = {"created_at": created, "turns": []}
            return cid

    def has_conversation(self, conversation_id: str) -> bool:
        with self._lock:
            return conversation_id in self._conversations

    def list_conversations(self) -> list[str]:
        with self._lock:
            return sorted(self._conversations)

    def append_turn(self, conversation_id: str, turn: ConversationTurn) -> ConversationTurn:
        with self._lock:
            conv = self._conversations.get(conversation_id)
            if conv is None:
                raise NotFound(f"conversation not found: {conversation_id}")
            for cid in turn.citation_chunk_ids:
                if cid not in self._chunks:
                    raise NotFound(f"citation references unknown chunk: {cid}")
            turn.turn_index = len(conv["turns"])
            if not turn.created_at:
                turn.created_at = now_iso()
            record = {"kind": "turn", "conversation_id": conversation_id, **asdict(turn)}
            _append_jsonl(self.conversations_path, record)
            conv["turns"].append(turn)
            return turn

    def get_history(self, conversation_id: str, last_n: int | None = None) -> list[ConversationTurn]:
        with self._lock:
            conv = self._conversations.get(conversation_id)
            if conv is None:
                raise NotFound(f"conversation not found: {conversation_id}")
            turns = conv["turns"]
            if last_n is None:
                return list(turns)
            if last_n <= 0:
                return []
            return list(turns[-last_n:])

    # -- index -----------------------------------------------------------------

    @property
    def index(self) -> HnswIndex:
        with self._lock:
            if self._index is None:
                if self.index_path.exists():
                    try:
                        loaded = HnswIndex.load(self.index_path)
                    except CorruptFile:
                        loaded = None
                    if loaded is not None and len(loaded) == len(self._chunks):
                        self._index = loaded
                if self._index is None:
                    self.rebuild_index()
                    self.save_index()
            return self._index

    def rebuild_index(self) -> None:
        with self._lock:
            index = HnswIndex(self._index_params)
            for chunk in sorted(self._chunks.values(), key=lambda c: c.embedding_row):
                index.insert(chunk.chunk_id, self._matrix[chunk.embedding_row])
            self._index = index

    def save_index(self) -> None:
        with self._lock:
            if self._index is not None:
                tmp = self.index_path.with_name(self.index_path.name + ".tmp")
                self._index.save(tmp)
                os.replace(tmp, self.index_path)
