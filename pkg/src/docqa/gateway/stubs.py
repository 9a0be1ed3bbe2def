"""Deterministic in-process backends for offline operation and tests.

The hashed-token embedder and the lexical reranker are real (if crude)
models: they behave consistently enough to drive the whole pipeline without
any inference server. The scripted generator replays canned responses keyed
on prompt substrings.
"""

from __future__ import annotations

import numpy as np

from ..errors import BackendUnavailable
from .base import EmbeddingClient, GenerationClient, GenerationRequest, RerankClient

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: str) -> int:
    """64-bit FNV-1a over the UTF-8 bytes of ``data``."""
    h = _FNV_OFFSET
    for byte in data.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def _tokens(text: str) -> list[str]:
    return text.lower().split()


class HashedTokenEmbedder(EmbeddingClient):
    """Bag-of-words embedder over hashed token buckets.

    Each token lands in bucket ``fnv1a_64(token) % dim`` with sign +1 for an
    even hash and -1 for an odd one; token vectors are summed and the result
    L2-normalized. Identical bags of words map to identical vectors, and
    texts with disjoint vocabularies are orthogonal unless buckets collide.
    """

    def __init__(self, dim: int = 256):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim

    def embed_batch(self, inputs: list[str]) -> np.ndarray:
        if not inputs:
            raise ValueError("embed_batch requires a non-empty input list")
        out = np.zeros((len(inputs), self.dim), dtype=np.float64)
        for row, text in enumerate(inputs):
            for token in _tokens(text):
                h = fnv1a_64(token)
                sign = 1.0 if h % 2 == 0 else -1.0
                out[row, h % self.dim] += sign
            norm = np.linalg.norm(out[row])
            if norm > 0.0:
                out[row] /= norm
            else:
                # Text with no tokens: fixed unit vector so downstream
                # cosine math stays well defined.
                out[row, 0] = 1.0
        return out


class ScriptedGenerator(GenerationClient):
    """Replays canned responses: first rule whose key is a prompt substring wins.

    Rules match against system + prompt. With no matching rule the generator
    falls back to ``default`` or, if none was given, to a deterministic echo
    of the prompt head (so pipelines stay runnable without a full script).
    """

    def __init__(self, rules: list[tuple[str, str]] | None = None, default: str | None = None):
        self.rules = list(rules or [])
        self.default = default
        self.calls: list[GenerationRequest] = []

    def generate(self, request: GenerationRequest) -> str:
        self.calls.append(request)
        haystack = request.system + "\n" + request.prompt
        for key, response in self.rules:
            if key in haystack:
                return response
        if self.default is not None:
            return self.default
        head = " ".join(request.prompt.split()[:12])
        return f"[scripted] {head}"

    @property
    def call_count(self) -> int:
        return len(self.calls)


class UnavailableEmbedder(EmbeddingClient):
    def embed_batch(self, inputs: list[str]) -> np.ndarray:
        raise BackendUnavailable("embedding backend configured as unavailable")

    def health(self) -> bool:
        return False


class UnavailableGenerator(GenerationClient):
    """Always raises; used to exercise degradation paths."""

    def __init__(self) -> None:
        self.call_count = 0

    def generate(self, request: GenerationRequest) -> str:
        self.call_count += 1
        raise BackendUnavailable("generation backend configured as unavailable")

    def health(self) -> bool:
        return False


class UnavailableReranker(RerankClient):
    def rerank_scores(self, query: str, passages: list[str]) -> list[float]:
        raise BackendUnavailable("rerank backend configured as unavailable")

    def health(self) -> bool:
        return False


class LexicalReranker(RerankClient):
    """Jaccard token overlap between query and passage; bounded to [0, 1]."""

    def rerank_scores(self, query: str, passages: list[str]) -> list[float]:
        if not passages:
            raise ValueError("rerank_scores requires at least one passage")
        q = set(_tokens(query))
        scores = []
        for passage in passages:
            p = set(_tokens(passage))
            union = q | p
            scores.append(len(q & p) / len(union) if union else 0.0)
        return scores


class CountingEmbedder(EmbeddingClient):
    """Pass-through wrapper that records every batch it forwards."""

    def __init__(self, inner: EmbeddingClient):
        self.inner = inner
        self.batches: list[list[str]] = []

    def embed_batch(self, inputs: list[str]) -> np.ndarray:
        self.batches.append(list(inputs))
        return self.inner.embed_batch(inputs)

    def health(self) -> bool:
        return self.inner.health()
