"""Client interfaces for embedding, generation, and rerank backends.

All model access in the engine flows through these three small interfaces.
Concrete implementations are either JSON-over-HTTP clients (``http`` module)
or deterministic in-process doubles (``stubs`` module).
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class GenerationRequest:
    """One generation call: prompt plus decoding options forwarded verbatim."""

    prompt: str
    system: str = ""
    model: str = ""
    temperature: float = 0.1
    context_window: int = 32000


class EmbeddingClient(abc.ABC):
    """Maps batches of texts to L2-normalized vectors of a fixed dimension."""

    @abc.abstractmethod
    def embed_batch(self, inputs: list[str]) -> np.ndarray:
        """Return an array of shape (len(inputs), dim), rows normalized to unit length."""

    def embed_one(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def health(self) -> bool:
        return True


class GenerationClient(abc.ABC):
    @abc.abstractmethod
    def generate(self, request: GenerationRequest) -> str:
        """Return the full response text, without client-side truncation."""

    def health(self) -> bool:
        return True


class RerankClient(abc.ABC):
    @abc.abstractmethod
    def rerank_scores(self, query: str, passages: list[str]) -> list[float]:
        """Return one finite relevance score per passage; higher means more relevant."""

    def health(self) -> bool:
        return True


def l2_normalize(vectors: np.ndarray) -> np.ndarray:
    """Normalize rows to unit L2 norm. Zero rows are left untouched."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim == 1:
        vectors = vectors[None, :]
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return vectors / safe


def logistic(x: float) -> float:
    """Map an unbounded logit into (0, 1)."""
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)
