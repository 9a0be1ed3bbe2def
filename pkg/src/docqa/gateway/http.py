"""JSON-over-HTTP clients for local inference servers.

Wire protocol (all POST, JSON bodies):
    {base}/api/embed    {"model": m, "input": [t...]}            -> {"embeddings": [[f...]...]}
    {base}/api/generate {"model": m, "system": s, "prompt": p,
                         "options": {"temperature": t, "num_ctx": n},
                         "stream": false}                         -> {"response": text}
    {base}/api/rerank   {"query": q, "documents": [t...]}         -> {"scores": [f...]}

Requests are pure request/response, so the retry policy (2 retries with
exponential backoff) never duplicates side effects.
"""

from __future__ import annotations

import time

import numpy as np
import requests

from ..errors import BackendUnavailable, ContextOverflow, DimensionMismatch
from .base import (
    EmbeddingClient,
    GenerationClient,
    GenerationRequest,
    RerankClient,
    l2_normalize,
    logistic,
)

_MAX_RETRIES = 2


def _post_json(url: str, payload: dict, timeout: float, backoff: float) -> dict:
    last_error: Exception | None = None
    for attempt in range(_MAX_RETRIES + 1):
        try:
            response = requests.post(url, json=payload, timeout=timeout)
        except requests.RequestException as exc:
            last_error = exc
        else:
            if response.status_code == 200:
                return response.json()
            if response.status_code == 413:
                raise ContextOverflow(f"{url} rejected request: {response.text[:200]}")
            last_error = BackendUnavailable(
                f"{url} returned status {response.status_code}: {response.text[:200]}"
            )
            if 400 <= response.status_code < 500:
                break  # client errors will not improve on retry
        if attempt < _MAX_RETRIES:
            time.sleep(backoff * (2**attempt))
    raise BackendUnavailable(f"POST {url} failed: {last_error}")


class HttpEmbeddingClient(EmbeddingClient):
    def __init__(
        self,
        base_url: str,
        model: str,
        batch_limit: int = 64,
        timeout: float = 120.0,
        backoff: float = 0.5,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.batch_limit = max(1, batch_limit)
        self.timeout = timeout
        self.backoff = backoff
        self._dim: int | None = None

    def embed_batch(self, inputs: list[str]) -> np.ndarray:
        if not inputs:
            raise ValueError("embed_batch requires a non-empty input list")
        if any(not text for text in inputs):
            raise ValueError("embed_batch inputs must be non-empty strings")
        rows: list[list[float]] = []
        for start in range(0, len(inputs), self.batch_limit):
            chunk = inputs[start : start + self.batch_limit]
            body = _post_json(
                f"{self.base_url}/api/embed",
                {"model": self.model, "input": chunk},
                self.timeout,
                self.backoff,
            )
            vectors = body.get("embeddings")
            if not isinstance(vectors, list) or len(vectors) != len(chunk):
                raise BackendUnavailable("embed response missing or mis-sized 'embeddings'")
            rows.extend(vectors)
        dims = {len(v) for v in rows}
        if len(dims) != 1:
            raise DimensionMismatch(f"server returned inconsistent dimensions: {sorted(dims)}")
        dim = dims.pop()
        if self._dim is None:
            self._dim = dim
        elif self._dim != dim:
            raise DimensionMismatch(f"expected dimension {self._dim}, server returned {dim}")
        return l2_normalize(np.asarray(rows, dtype=np.float64))

    def health(self) -> bool:
        try:
            requests.get(self.base_url, timeout=5.0)
            return True
        except requests.RequestException:
            return False


class HttpGenerationClient(GenerationClient):
    def __init__(self, base_url: str, model: str, timeout: float = 600.0, backoff: float = 0.5):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.backoff = backoff

    def generate(self, request: GenerationRequest) -> str:
        payload = {
            "model": request.model or self.model,
            "system": request.system,
            "prompt": request.prompt,
            "options": {
                "temperature": request.temperature,
                "num_ctx": request.context_window,
            },
            "stream": False,
        }
        body = _post_json(f"{self.base_url}/api/generate", payload, self.timeout, self.backoff)
        response = body.get("response")
        if not isinstance(response, str):
            raise BackendUnavailable("generate response missing 'response' text")
        return response

    def health(self) -> bool:
        try:
            requests.get(self.base_url, timeout=5.0)
            return True
        except requests.RequestException:
            return False


class HttpRerankClient(RerankClient):
    """Cross-encoder scoring endpoint.

    When ``logistic_map`` is set, raw backend scores are squashed through the
    logistic function so downstream top-p filtering sees values in (0, 1).
    """

    def __init__(
        self,
        base_url: str,
        logistic_map: bool = True,
        timeout: float = 120.0,
        backoff: float = 0.5,
    ):
        self.base_url = base_url.rstrip("/")
        self.logistic_map = logistic_map
        self.timeout = timeout
        self.backoff = backoff

    def rerank_scores(self, query: str, passages: list[str]) -> list[float]:
        if not passages:
            raise ValueError("rerank_scores requires at least one passage")
        body = _post_json(
            f"{self.base_url}/api/rerank",
            {"query": query, "documents": passages},
            self.timeout,
            self.backoff,
        )
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(passages):
            raise BackendUnavailable("rerank response missing or mis-sized 'scores'")
        values = [float(s) for s in scores]
        if self.logistic_map:
            values = [logistic(v) for v in values]
        return values

    def health(self) -> bool:
        try:
            requests.get(self.base_url, timeout=5.0)
            return True
        except requests.RequestException:
            return False
