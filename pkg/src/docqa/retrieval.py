"""Multi-stage retrieval: hypothetical-answer retrieval, five-way query
rewording, reciprocal rank fusion, dynamic top-p filtering, reranking, and a
second top-p filter.

Every stage that depends on the generation or rerank backend degrades
gracefully: the hypothetical answer falls back to the raw query, rewordings
fall back to copies of it, and reranking falls back to lexical overlap. Each
fallback is flagged in the trace, and the pipeline still returns results as
plain raw-query retrieval when everything is down.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import BackendUnavailable, EmptyCandidates, EmptyIndex
from .gateway.base import EmbeddingClient, GenerationClient, GenerationRequest, RerankClient
from .gateway.stubs import LexicalReranker
from .hnsw import HnswIndex, SearchHit
from .store import DataStore

HYDE_SYSTEM = (
    "Write a short passage, as it would appear in the document described "
    "below, that directly answers the user's question. Use only plausible "
    "document language. Document summary: {summary}"
)
MULTIQUERY_SYSTEM = (
    "Rewrite the user's question in 5 semantically different ways, one per "
    "line, numbered 1-5. Context summary: {summary}"
)

REWORD_COUNT = 5

_ENUMERATION = re.compile(r"^\s*(?:\d{1,2}\s*[.)：:]\s*|[-•*]\s+)")


@dataclass
class RetrievalConfig:
    k_per_list: int = 10
    rrf_k: float = 60.0
    fuse_top_p: float = 0.75
    rerank_top_p: float = 0.9
    max_context_chunks: int = 12
    include_original_query: bool = False

    def __post_init__(self) -> None:
        if self.k_per_list < 1:
            raise ValueError("k_per_list must be >= 1")
        if self.rrf_k <= 0:
            raise ValueError("rrf_k must be > 0")
        for name in ("fuse_top_p", "rerank_top_p"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if self.max_context_chunks < 1:
            raise ValueError("max_context_chunks must be >= 1")


@dataclass
class RankedList:
    origin: str
    hits: list[SearchHit]


@dataclass
class FusedCandidate:
    chunk_id: str
    rrf_score: float
    contributing_origins: set[str] = field(default_factory=set)


@dataclass
class RetrievalTrace:
    query: str
    document_id: str | None = None
    summary_used: str = ""
    hypothetical_answer: str = ""
    hyde_degraded: bool = False
    rewordings: list[str] = field(default_factory=list)
    multiquery_degraded: bool = False
    lists: list[dict] = field(default_factory=list)
    fused: list[dict] = field(default_factory=list)
    fuse_selected_chunk_ids: list[str] = field(default_factory=list)
    rerank_degraded: bool = False
    reranked: list[dict] = field(default_factory=list)
    final: list[dict] = field(default_factory=list)
    dropped_for_budget: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "document_id": self.document_id,
            "summary_used": self.summary_used,
            "hypothetical_answer": self.hypothetical_answer,
            "hyde_degraded": self.hyde_degraded,
            "rewordings": list(self.rewordings),
            "multiquery_degraded": self.multiquery_degraded,
            "lists": self.lists,
            "fused": self.fused,
            "fuse_selected_chunk_ids": list(self.fuse_selected_chunk_ids),
            "rerank_degraded": self.rerank_degraded,
            "reranked": self.reranked,
            "final": self.final,
            "dropped_for_budget": list(self.dropped_for_budget),
        }


def hyde_generate(
    query: str, document_summary: str, generator: GenerationClient
) -> tuple[str, bool]:
    """Hypothetical answer passage for the query; (text, degraded) where a
    degraded stage returns the raw query itself."""
    if not query.strip():
        raise ValueError("query must be non-empty")
    system = HYDE_SYSTEM.format(summary=document_summary)
    try:
        return generator.generate(GenerationRequest(prompt=query, system=system)), False
    except BackendUnavailable:
        return query, True


def _parse_rewordings(raw: str) -> list[str]:
    out = []
    for line in raw.splitlines():
        cleaned = _ENUMERATION.sub("", line).strip()
        if cleaned:
            out.append(cleaned)
    return out


def multi_query_generate(
    query: str, document_summary: str, generator: GenerationClient
) -> tuple[list[str], bool]:
    """Exactly five rewordings of the query; (rewordings, degraded).

    Short generator output is retried once, then padded with the original
    query; an unavailable backend yields five copies of the original.
    """
    if not query.strip():
        raise ValueError("query must be non-empty")
    system = MULTIQUERY_SYSTEM.format(summary=document_summary)
    request = GenerationRequest(prompt=query, system=system)
    try:
        parsed = _parse_rewordings(generator.generate(request))
        if len(parsed) < REWORD_COUNT:
            parsed = _parse_rewordings(generator.generate(request))
        degraded = False
    except BackendUnavailable:
        parsed = []
        degraded = True
    while len(parsed) < REWORD_COUNT:
        parsed.append(query)
    return parsed[:REWORD_COUNT], degraded


def retrieve_lists(
    origin_texts: Sequence[tuple[str, str]],
    embed: EmbeddingClient,
    index: HnswIndex,
    k_per_list: int,
) -> list[RankedList]:
    """One RankedList per (origin, text) input, all texts embedded in a
    single batch."""
    if len(index) == 0:
        raise EmptyIndex("retrieval requested against an empty index")
    vectors = embed.embed_batch([text for _, text in origin_texts])
    return [
        RankedList(origin=origin, hits=index.search_knn(vectors[i], k_per_list))
        for i, (origin, _) in enumerate(origin_texts)
    ]


def rrf_fuse(lists: Sequence[RankedList], rrf_k: float = 60.0) -> list[FusedCandidate]:
    """Reciprocal rank fusion: score(c) = sum over lists of 1/(rrf_k + rank).

    Sorted by score descending, ties by chunk_id ascending; list order does
    not matter.
    """
    if not lists:
        raise ValueError("rrf_fuse requires at least one list")
    scores: dict[str, float] = {}
    origins: dict[str, set[str]] = {}
    for ranked in lists:
        for hit in ranked.hits:
            scores[hit.chunk_id] = scores.get(hit.chunk_id, 0.0) + 1.0 / (rrf_k + hit.rank)
            origins.setdefault(hit.chunk_id, set()).add(ranked.origin)
    fused = [
        FusedCandidate(chunk_id=cid, rrf_score=score, contributing_origins=origins[cid])
        for cid, score in scores.items()
    ]
    fused.sort(key=lambda c: (-c.rrf_score, c.chunk_id))
    return fused


def top_p_filter(
    scored: Sequence[tuple[str, float]], p: float, max_items: int
) -> list[tuple[str, float]]:
    """Shortest prefix of the descending-sorted candidates whose
    sum-normalized weight reaches p; never empty, capped at max_items, and
    all-zero scores select just the top candidate."""
    if not scored:
        raise EmptyCandidates("top-p filter received no candidates")
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    if max_items < 1:
        raise ValueError("max_items must be >= 1")
    values = [score for _, score in scored]
    if any(v < 0 for v in values):
        raise ValueError("top-p filter requires non-negative scores")
    if any(values[i] < values[i + 1] for i in range(len(values) - 1)):
        raise ValueError("top-p filter requires scores sorted descending")
    total = sum(values)
    if total == 0.0:
        return [scored[0]]
    target = p * total
    acc = 0.0
    prefix = []
    for item in scored:
        prefix.append(item)
        acc += item[1]
        if acc >= target:
            break
    return prefix[:max_items]


def rerank(
    query: str,
    candidates: Sequence[tuple[str, str]],
    client: RerankClient,
) -> tuple[list[tuple[str, float]], bool]:
    """Score (chunk_id, text) candidates against the original query and sort
    descending with chunk_id tie-break; falls back to lexical overlap when
    the rerank backend is down. Returns (scored, degraded)."""
    if not candidates:
        raise EmptyCandidates("rerank received no candidates")
    texts = [text for _, text in candidates]
    degraded = False
    try:
        scores = client.rerank_scores(query, texts)
    except BackendUnavailable:
        scores = LexicalReranker().rerank_scores(query, texts)
        degraded = True
    rescored = [(cid, float(score)) for (cid, _), score in zip(candidates, scores)]
    rescored.sort(key=lambda pair: (-pair[1], pair[0]))
    return rescored, degraded


def retrieve_pipeline(
    query: str,
    *,
    store: DataStore,
    index: HnswIndex,
    embed: EmbeddingClient,
    generator: GenerationClient,
    reranker: RerankClient,
    config: RetrievalConfig | None = None,
    document_id: str | None = None,
) -> tuple[list[tuple[str, float]], RetrievalTrace]:
    """Full retrieval pass returning (final (chunk_id, rerank_score) list,
    trace). Final size is between 1 and max_context_chunks."""
    config = config or RetrievalConfig()
    if len(index) == 0:
        raise EmptyIndex("no ingested chunks to retrieve from")

    if document_id is not None:
        summary = store.get_document(document_id).summary
    else:
        summary = "\n".join(d.summary for d in store.list_documents())[:2000]

    trace = RetrievalTrace(query=query, document_id=document_id, summary_used=summary)

    hypothetical, trace.hyde_degraded = hyde_generate(query, summary, generator)
    trace.hypothetical_answer = hypothetical
    rewordings, trace.multiquery_degraded = multi_query_generate(query, summary, generator)
    trace.rewordings = rewordings

    origin_texts = [("hyde", hypothetical)] + [
        (f"reword_{i + 1}", text) for i, text in enumerate(rewordings)
    ]
    if config.include_original_query:
        origin_texts.append(("original_query", query))

    lists = retrieve_lists(origin_texts, embed, index, config.k_per_list)
    trace.lists = [
        {
            "origin": ranked.origin,
            "hits": [
                {"chunk_id": h.chunk_id, "similarity": h.similarity, "rank": h.rank}
                for h in ranked.hits
            ],
        }
        for ranked in lists
    ]

    fused = rrf_fuse(lists, config.rrf_k)
    trace.fused = [
        {
            "chunk_id": c.chunk_id,
            "rrf_score": c.rrf_score,
            "origins": sorted(c.contributing_origins),
        }
        for c in fused
    ]

    selected = top_p_filter(
        [(c.chunk_id, c.rrf_score) for c in fused], config.fuse_top_p, config.max_context_chunks
    )
    trace.fuse_selected_chunk_ids = [cid for cid, _ in selected]

    candidates = [(cid, store.get_chunk(cid).text) for cid, _ in selected]
    rescored, trace.rerank_degraded = rerank(query, candidates, reranker)
    trace.reranked = [{"chunk_id": cid, "score": score} for cid, score in rescored]

    final = top_p_filter(rescored, config.rerank_top_p, config.max_context_chunks)
    trace.final = [{"chunk_id": cid, "score": score} for cid, score in final]
    return final, trace
