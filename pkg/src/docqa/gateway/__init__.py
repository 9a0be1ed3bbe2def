from .base import (
    EmbeddingClient,
    GenerationClient,
    GenerationRequest,
    RerankClient,
    l2_normalize,
    logistic,
)
from .http import HttpEmbeddingClient, HttpGenerationClient, HttpRerankClient
from .stubs import (
    CountingEmbedder,
    HashedTokenEmbedder,
    LexicalReranker,
    ScriptedGenerator,
    UnavailableEmbedder,
    UnavailableGenerator,
    UnavailableReranker,
    fnv1a_64,
)

__all__ = [
    "EmbeddingClient",
    "GenerationClient",
    "GenerationRequest",
    "RerankClient",
    "l2_normalize",
    "logistic",
    "HttpEmbeddingClient",
    "HttpGenerationClient",
    "HttpRerankClient",
    "CountingEmbedder",
    "HashedTokenEmbedder",
    "LexicalReranker",
    "ScriptedGenerator",
    "UnavailableEmbedder",
    "UnavailableGenerator",
    "UnavailableReranker",
    "fnv1a_64",
]
