"""Engine facade wiring configuration, storage, gateway clients, ingestion,
retrieval, and generation behind one object. The HTTP service, the CLI, and
the evaluation harness all consume this interface."""

from __future__ import annotations

from pathlib import Path

from .config import EngineConfig
from .gateway.base import EmbeddingClient, GenerationClient, RerankClient
from .gateway.http import HttpEmbeddingClient, HttpGenerationClient, HttpRerankClient
from .gateway.stubs import HashedTokenEmbedder, LexicalReranker, ScriptedGenerator
from .generation import Answer, answer_query
from .ingest import FORMAT_PDF, FORMAT_PLAIN_TEXT, ingest_document
from .store import ConversationTurn, DataStore, DocumentRecord


def build_embedder(config: EngineConfig) -> EmbeddingClient:
    if config.embed.mode == "hashed":
        return HashedTokenEmbedder(dim=config.embed.dim)
    if config.embed.mode == "http":
        return HttpEmbeddingClient(
            base_url=config.embed.base_url,
            model=config.embed.model,
            batch_limit=config.embed.batch_limit,
        )
    raise ValueError(f"unknown embed mode: {config.embed.mode!r}")


def build_generator(config: EngineConfig) -> GenerationClient:
    if config.generate.mode == "echo":
        return ScriptedGenerator(rules=[])
    if config.generate.mode == "http":
        return HttpGenerationClient(
            base_url=config.generate.base_url, model=config.generate.model
        )
    raise ValueError(f"unknown generate mode: {config.generate.mode!r}")


def build_reranker(config: EngineConfig) -> RerankClient:
    if config.rerank.mode == "lexical":
        return LexicalReranker()
    if config.rerank.mode == "http":
        return HttpRerankClient(
            base_url=config.rerank.base_url, logistic_map=config.rerank.logistic_map
        )
    raise ValueError(f"unknown rerank mode: {config.rerank.mode!r}")


def guess_format(file_name: str) -> str:
    return FORMAT_PDF if file_name.lower().endswith(".pdf") else FORMAT_PLAIN_TEXT


class Engine:
    def __init__(
        self,
        config: EngineConfig | None = None,
        *,
        embed: EmbeddingClient | None = None,
        generator: GenerationClient | None = None,
        reranker: RerankClient | None = None,
    ):
        self.config = config or EngineConfig()
        self.embed = embed or build_embedder(self.config)
        self.generator = generator or build_generator(self.config)
        self.reranker = reranker or build_reranker(self.config)
        self.store = DataStore(
            self.config.data_dir,
            index_params=self.config.index.to_params(),
            embed_model=self.config.embed.model,
        )

    # -- documents ----------------------------------------------------------

    def ingest_bytes(self, data: bytes, file_name: str, fmt: str | None = None):
        fmt = fmt or guess_format(file_name)
        return ingest_document(
            data,
            file_name,
            fmt,
            store=self.store,
            embed=self.embed,
            generator=self.generator,
            settings=self.config.chunking.to_settings(),
            summary_max_chars=self.config.summary_max_chars,
        )

    def ingest_file(self, path: str | Path, fmt: str | None = None):
        path = Path(path)
        return self.ingest_bytes(path.read_bytes(), path.name, fmt)

    def list_documents(self) -> list[DocumentRecord]:
        return self.store.list_documents()

    def get_document(self, document_id: str) -> DocumentRecord:
        return self.store.get_document(document_id)

    def delete_document(self, document_id: str) -> None:
        self.store.delete_document(document_id)

    # -- conversations --------------------------------------------------------

    def create_conversation(self) -> str:
        return self.store.create_conversation()

    def get_history(self, conversation_id: str) -> list[ConversationTurn]:
        return self.store.get_history(conversation_id)

    def answer(
        self,
        conversation_id: str,
        question: str,
        document_id: str | None = None,
        debug: bool = False,
    ) -> Answer:
        return answer_query(
            conversation_id,
            question,
            store=self.store,
            embed=self.embed,
            generator=self.generator,
            reranker=self.reranker,
            retrieval_config=self.config.retrieval,
            generation_config=self.config.generation,
            document_id=document_id,
            want_trace=debug,
        )

    # -- health -----------------------------------------------------------------

    def health(self) -> dict:
        embed_up = self.embed.health()
        generate_up = self.generator.health()
        rerank_up = self.reranker.health()
        return {
            "status": "ok" if (embed_up and generate_up and rerank_up) else "degraded",
            "embed_backend": embed_up,
            "generate_backend": generate_up,
            "rerank_backend": rerank_up,
            "index_size": self.store.chunk_count(),
        }
