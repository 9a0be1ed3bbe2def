"""Grounded answer generation: prompt assembly from retrieved chunks and
conversation history, refusal-sentinel detection, and citation-bearing
answers.

The model is instructed to answer only from the supplied excerpts and to
reply with a fixed sentinel when they do not support an answer. Citations
are guaranteed by construction: the answer carries exactly the chunks that
were placed in the prompt, in prompt order, so every claim can be traced to
stored text without parsing model output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BackendUnavailable, NotFound
from .gateway.base import GenerationClient, GenerationRequest
from .retrieval import RetrievalConfig, RetrievalTrace, retrieve_pipeline
from .store import ConversationTurn, DataStore

DEFAULT_SENTINEL = "not enough context"

ANSWER_SYSTEM_TEMPLATE = (
    "You answer questions about supplied document excerpts. Rules:\n"
    "1. Use only information from the numbered excerpts below. Do not use "
    "outside knowledge.\n"
    "2. Direct quotations from the source are preferred; reference excerpts "
    "by their [n] markers.\n"
    '3. If the excerpts do not contain the information needed, reply exactly '
    'with "{sentinel}".'
)

EMPTY_CONTEXT_BLOCK = "No relevant excerpts found."

_STRIP_CHARS = " \t\r\n\"'`.,:;!?()[]*"


@dataclass
class GenerationConfig:
    sentinel: str = DEFAULT_SENTINEL
    history_turns: int = 5
    temperature: float = 0.1
    context_window: int = 32000
    char_budget: int = 100_000
    refusal_exact: bool = False
    model: str = ""


@dataclass
class Citation:
    chunk_id: str
    file_name: str
    page_number: int
    text: str
    rerank_score: float

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "file_name": self.file_name,
            "page_number": self.page_number,
            "text": self.text,
            "score": self.rerank_score,
        }


@dataclass
class Answer:
    text: str
    insufficient_context: bool
    citations: list[Citation] = field(default_factory=list)
    trace_ref: dict | None = None
    error: str | None = None


@dataclass
class PromptBundle:
    system: str
    context_block: str
    history_block: str
    question: str

    def user_prompt(self) -> str:
        parts = ["Excerpts:", self.context_block]
        if self.history_block:
            parts += ["", "Conversation so far:", self.history_block]
        parts += ["", f"Question: {self.question}"]
        return "\n".join(parts)

    def rendered_length(self) -> int:
        return len(self.system) + len(self.user_prompt())


def _render_context(citations: list[Citation]) -> str:
    if not citations:
        return EMPTY_CONTEXT_BLOCK
    blocks = [
        f"[{i}] ({c.file_name}, p.{c.page_number})\n{c.text}"
        for i, c in enumerate(citations, start=1)
    ]
    return "\n\n".join(blocks)


def _render_history(history: list[ConversationTurn]) -> str:
    return "\n".join(f"Q: {turn.question}\nA: {turn.answer}" for turn in history)


def build_prompt(
    citations: list[Citation],
    history: list[ConversationTurn],
    question: str,
    config: GenerationConfig | None = None,
) -> tuple[PromptBundle, list[Citation], list[str]]:
    """Assemble the grounded prompt.

    Returns (bundle, kept citations, dropped chunk_ids); chunks are dropped
    tail-first until the rendered prompt fits the character budget, so the
    kept list always equals what the prompt contains.
    """
    config = config or GenerationConfig()
    system = ANSWER_SYSTEM_TEMPLATE.format(sentinel=config.sentinel)
    window = history[-config.history_turns:] if config.history_turns > 0 else []
    kept = list(citations)
    dropped: list[str] = []
    while True:
        bundle = PromptBundle(
            system=system,
            context_block=_render_context(kept),
            history_block=_render_history(window),
            question=question,
        )
        if bundle.rendered_length() <= config.char_budget or not kept:
            return bundle, kept, dropped
        dropped.append(kept.pop().chunk_id)


def detect_refusal(
    response: str, sentinel: str = DEFAULT_SENTINEL, exact: bool = False
) -> bool:
    """True when the response is the refusal sentinel.

    The response is lowercased, whitespace-collapsed, and stripped of
    surrounding punctuation and quotes; it counts as a refusal when it
    equals the sentinel or contains it starting within the first 40
    characters (unless exact matching is configured).
    """
    normalized = " ".join(response.lower().split()).strip(_STRIP_CHARS)
    target = " ".join(sentinel.lower().split())
    if normalized == target:
        return True
    if exact:
        return False
    position = normalized.find(target)
    return 0 <= position < 40


def answer_query(
    conversation_id: str,
    question: str,
    *,
    store: DataStore,
    embed,
    generator: GenerationClient,
    reranker,
    retrieval_config: RetrievalConfig | None = None,
    generation_config: GenerationConfig | None = None,
    document_id: str | None = None,
    want_trace: bool = False,
) -> Answer:
    """Retrieve, prompt, generate, and persist one conversation turn.

    When retrieval yields nothing (empty index), the generator is never
    called and the answer is the sentinel directly. A failed generation
    backend also produces a sentinel answer, with the error noted.
    """
    generation_config = generation_config or GenerationConfig()
    if not store.has_conversation(conversation_id):
        raise NotFound(f"conversation not found: {conversation_id}")
    if not question.strip():
        raise ValueError("question must be non-empty")

    history = store.get_history(conversation_id, last_n=generation_config.history_turns)

    trace: RetrievalTrace | None = None
    final: list[tuple[str, float]] = []
    if store.chunk_count() > 0:
        final, trace = retrieve_pipeline(
            question,
            store=store,
            index=store.index,
            embed=embed,
            generator=generator,
            reranker=reranker,
            config=retrieval_config,
            document_id=document_id,
        )

    citations = []
    for chunk_id, score in final:
        chunk = store.get_chunk(chunk_id)
        document = store.get_document(chunk.document_id)
        citations.append(
            Citation(
                chunk_id=chunk_id,
                file_name=document.file_name,
                page_number=chunk.page_number,
                text=chunk.text,
                rerank_score=score,
            )
        )

    error: str | None = None
    if not citations:
        text = generation_config.sentinel
        insufficient = True
    else:
        bundle, citations, dropped = build_prompt(
            citations, history, question, generation_config
        )
        if trace is not None:
            trace.dropped_for_budget = dropped
        request = GenerationRequest(
            prompt=bundle.user_prompt(),
            system=bundle.system,
            model=generation_config.model,
            temperature=generation_config.temperature,
            context_window=generation_config.context_window,
        )
        try:
            text = generator.generate(request)
            insufficient = detect_refusal(
                text, generation_config.sentinel, generation_config.refusal_exact
            )
        except BackendUnavailable as exc:
            text = generation_config.sentinel
            insufficient = True
            error = f"generation backend unavailable: {exc}"

    store.append_turn(
        conversation_id,
        ConversationTurn(
            turn_index=-1,
            question=question,
            answer=text,
            insufficient_context=insufficient,
            citation_chunk_ids=[c.chunk_id for c in citations],
        ),
    )
    return Answer(
        text=text,
        insufficient_context=insufficient,
        citations=citations,
        trace_ref=trace.to_dict() if (want_trace and trace is not None) else None,
        error=error,
    )
