"""HTTP API over the engine: document ingestion, conversations, grounded
queries, citations, and health. Serves the web client's static assets when a
build is present, but has no functional dependency on them.

The response wire formats are published in api_schema.json next to this
module and validated in tests.

No authentication is performed: this service trusts its network. Run it
behind your own access controls; do not expose it directly to untrusted
networks.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ..engine import Engine
from ..errors import (
    BackendUnavailable,
    EmptyDocument,
    EngineError,
    FormatError,
    MalformedDocument,
    NotFound,
)
from ..store import DocumentRecord
from .multipart import parse_multipart

logger = logging.getLogger(__name__)

FALLBACK_PAGE = """<!doctype html>
<html><head><title>Document QA</title></head>
<body><h1>Document QA service</h1>
<p>The API is live under <code>/api</code>. No web client build is installed;
see the frontend package for building one.</p></body></html>
"""


def _error_payload(code: str, message: str, detail: str | None = None) -> dict:
    body: dict = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return {"error": body}


def _error_response(status: int, code: str, message: str, detail: str | None = None) -> JSONResponse:
    return JSONResponse(status_code=status, content=_error_payload(code, message, detail))


def _document_dict(record: DocumentRecord) -> dict:
    return {
        "document_id": record.document_id,
        "file_name": record.file_name,
        "page_count": record.page_count,
        "summary": record.summary,
        "ingested_at": record.ingested_at,
        "summary_is_fallback": record.summary_is_fallback,
    }


def schema_path() -> Path:
    return Path(__file__).parent / "api_schema.json"


def load_schema() -> dict:
    return json.loads(schema_path().read_text(encoding="utf-8"))


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="document-qa", docs_url=None, redoc_url=None, openapi_url=None)

    origins = engine.config.service.cors_origins
    if origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(NotFound)
    async def _not_found(_req, exc: NotFound):
        return _error_response(404, "not_found", str(exc))

    @app.exception_handler(MalformedDocument)
    async def _malformed(_req, exc: MalformedDocument):
        return _error_response(400, "bad_request", str(exc))

    @app.exception_handler(EmptyDocument)
    async def _empty_doc(_req, exc: EmptyDocument):
        return _error_response(422, "bad_request", str(exc))

    @app.exception_handler(BackendUnavailable)
    async def _backend_down(_req, exc: BackendUnavailable):
        return _error_response(503, "backend_unavailable", str(exc))

    @app.exception_handler(EngineError)
    async def _engine_error(_req, exc: EngineError):
        logger.exception("unhandled engine error")
        return _error_response(500, "internal", str(exc))

    @app.post("/api/documents")
    async def ingest(request: Request):
        content_type = request.headers.get("content-type", "")
        body = await request.body()
        if not body:
            return _error_response(400, "bad_request", "request body is empty")

        data: bytes | None = None
        file_name = request.query_params.get("name", "")
        if content_type.startswith("application/json"):
            try:
                payload = json.loads(body)
            except ValueError:
                return _error_response(400, "bad_request", "invalid JSON body")
            if not isinstance(payload, dict) or "text" not in payload:
                return _error_response(400, "bad_request", 'JSON ingestion needs {"name", "text"}')
            file_name = str(payload.get("name") or file_name or "document.txt")
            data = str(payload["text"]).encode("utf-8")
        elif content_type.startswith("multipart/"):
            try:
                parts = parse_multipart(content_type, body)
            except FormatError as exc:
                return _error_response(400, "bad_request", str(exc))
            file_part = next(
                (p for p in parts if p.filename), next(iter(parts), None)
            )
            if file_part is None or not file_part.data:
                return _error_response(400, "bad_request", "multipart body holds no file")
            file_name = file_part.filename or file_name or "upload.bin"
            data = file_part.data
        else:
            # Raw upload; name via ?name= query parameter.
            data = body
            file_name = file_name or "upload.bin"

        fmt = "pdf" if data[:5] == b"%PDF-" or file_name.lower().endswith(".pdf") else "plain_text"
        record, chunk_count = engine.ingest_bytes(data, file_name, fmt)
        return {
            "document_id": record.document_id,
            "page_count": record.page_count,
            "chunk_count": chunk_count,
            "summary": record.summary,
        }

    @app.get("/api/documents")
    async def list_documents():
        return {"documents": [_document_dict(d) for d in engine.list_documents()]}

    @app.delete("/api/documents/{document_id}")
    async def delete_document(document_id: str):
        engine.delete_document(document_id)
        return {"document_id": document_id, "deleted": True}

    @app.post("/api/conversations")
    async def create_conversation():
        return {"conversation_id": engine.create_conversation()}

    @app.get("/api/conversations/{conversation_id}")
    async def conversation_history(conversation_id: str):
        turns = engine.get_history(conversation_id)
        return {
            "conversation_id": conversation_id,
            "turns": [
                {
                    "turn_index": t.turn_index,
                    "question": t.question,
                    "answer": t.answer,
                    "insufficient_context": t.insufficient_context,
                    "citation_chunk_ids": list(t.citation_chunk_ids),
                    "created_at": t.created_at,
                }
                for t in turns
            ],
        }

    @app.post("/api/conversations/{conversation_id}/query")
    async def query(conversation_id: str, request: Request):
        try:
            payload = json.loads(await request.body())
        except ValueError:
            return _error_response(400, "bad_request", "invalid JSON body")
        question = str(payload.get("question", "")).strip()
        if not question:
            return _error_response(400, "bad_request", "question must be non-empty")
        document_id = payload.get("document_id")
        debug = bool(payload.get("debug", False))
        try:
            answer = engine.answer(
                conversation_id, question, document_id=document_id, debug=debug
            )
        except BackendUnavailable as exc:
            # A hard backend failure still produces a usable answer body.
            sentinel = engine.config.generation.sentinel
            return JSONResponse(
                status_code=503,
                content={
                    "answer": sentinel,
                    "insufficient_context": True,
                    "citations": [],
                    "error": {"code": "backend_unavailable", "message": str(exc)},
                },
            )
        body = {
            "answer": answer.text,
            "insufficient_context": answer.insufficient_context,
            "citations": [c.to_dict() for c in answer.citations],
        }
        if answer.trace_ref is not None:
            body["trace"] = answer.trace_ref
        if answer.error is not None:
            return JSONResponse(
                status_code=503,
                content={**body, "error": {"code": "backend_unavailable", "message": answer.error}},
            )
        return body

    @app.get("/api/health")
    async def health():
        return engine.health()

    static_dir = Path(__file__).parent / "static"
    if (static_dir / "index.html").exists():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    else:
        @app.get("/", include_in_schema=False)
        async def root() -> HTMLResponse:
            return HTMLResponse(FALLBACK_PAGE)

    return app
