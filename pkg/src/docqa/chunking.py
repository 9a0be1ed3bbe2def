"""Text segmentation: semantic breakpoint chunking and recursive character splitting.

The semantic chunker embeds sentence groups, measures consecutive cosine
distances, and breaks where the distance exceeds a statistical threshold
(standard-deviation, percentile, or gradient rule). The recursive chunker is
the fixed-size baseline used by the chunking benchmark.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gateway.base import EmbeddingClient

SEMANTIC_METHODS = ("standard_deviation", "percentile", "gradient")

# Words ending in '.' that do not terminate a sentence.
_ABBREVIATIONS = frozenset({"Mr.", "Dr.", "No.", "e.g.", "i.e.", "etc.", "vs."})

_TERMINALS = ".?!"

_RECURSIVE_SEPARATORS = ("\n\n", "\n", ". ", " ", "")


@dataclass
class SentenceSpan:
    """A sentence with character offsets into its source text."""

    index: int
    text: str
    start_offset: int
    end_offset: int


@dataclass
class SemanticChunkConfig:
    method: str = "standard_deviation"
    amount: float = 1.0
    buffer_size: int = 1

    def __post_init__(self) -> None:
        if self.method not in SEMANTIC_METHODS:
            raise ValueError(f"unknown breakpoint method: {self.method!r}")
        if self.amount <= 0:
            raise ValueError("amount must be > 0")
        if self.method in ("percentile", "gradient") and self.amount > 1:
            raise ValueError(f"{self.method} amount is a quantile fraction in (0, 1]")
        if self.buffer_size < 0:
            raise ValueError("buffer_size must be >= 0")


@dataclass
class RecursiveChunkConfig:
    chunk_size: int = 750
    overlap: int = 200

    def __post_init__(self) -> None:
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if not 0 <= self.overlap < self.chunk_size:
            raise ValueError("overlap must satisfy 0 <= overlap < chunk_size")


@dataclass
class Chunk:
    """A contiguous text span with provenance, filled in by ingestion."""

    text: str
    start_offset: int
    end_offset: int
    chunk_id: str = ""
    document_id: str = ""
    page_number: int = 0
    chunk_index: int = 0
    embedding: np.ndarray | None = field(default=None, repr=False)


def _prev_word(text: str, end: int, floor: int) -> str:
    """Whitespace-delimited word ending just before position ``end``."""
    j = end
    while j > floor and not text[j - 1].isspace():
        j -= 1
    return text[j:end]


def _is_suppressed_period(text: str, period: int, sent_start: int) -> bool:
    word = _prev_word(text, period + 1, sent_start)
    if word in _ABBREVIATIONS:
        return True
    # Single capital initial mid-name ("John F. Kennedy"): suppressed only
    # when a preceding capitalized word exists, so "A. B?" still splits.
    if len(word) == 2 and word[0].isupper() and word[0].isalpha() and word[1] == ".":
        j = period + 1 - len(word)
        while j > sent_start and text[j - 1].isspace():
            j -= 1
        before = _prev_word(text, j, sent_start)
        if before and before[0].isupper() and before[0].isalpha():
            return True
    return False


def _trimmed_span(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def split_sentences(text: str) -> list[SentenceSpan]:
    """Split on '.', '?', '!' followed by whitespace; "\\n\\n" always breaks.

    A fixed abbreviation list and name-internal single initials suppress
    periods. Returned spans are trimmed, ordered, non-overlapping, and cover
    every non-whitespace character of the input.
    """
    spans: list[SentenceSpan] = []
    if not text:
        return spans

    # Hard paragraph breaks first.
    blocks: list[tuple[int, int]] = []
    cursor = 0
    while True:
        hit = text.find("\n\n", cursor)
        if hit == -1:
            blocks.append((cursor, len(text)))
            break
        blocks.append((cursor, hit))
        cursor = hit + 2

    boundaries: list[tuple[int, int]] = []
    for block_start, block_end in blocks:
        sent_start = block_start
        i = block_start
        while i < block_end:
            ch = text[i]
            if ch in _TERMINALS and i + 1 < block_end and text[i + 1].isspace():
                if ch == "." and _is_suppressed_period(text, i, sent_start):
                    i += 1
                    continue
                boundaries.append((sent_start, i + 1))
                sent_start = i + 1
            i += 1
        boundaries.append((sent_start, block_end))

    for start, end in boundaries:
        start, end = _trimmed_span(text, start, end)
        if start < end:
            spans.append(SentenceSpan(len(spans), text[start:end], start, end))
    return spans


def consecutive_distances(
    sentences: list[SentenceSpan],
    embed: EmbeddingClient,
    buffer_size: int = 1,
) -> list[float]:
    """Cosine distances between consecutive buffered sentence groups.

    Group i concatenates sentences [i - buffer_size, i + buffer_size] clipped
    to bounds; the result has length len(sentences) - 1 with each value in
    [0, 2].
    """
    n = len(sentences)
    if n < 2:
        raise ValueError("consecutive_distances requires at least 2 sentences")
    groups = [
        " ".join(s.text for s in sentences[max(0, i - buffer_size) : i + buffer_size + 1])
        for i in range(n)
    ]
    vectors = embed.embed_batch(groups)
    sims = np.sum(vectors[:-1] * vectors[1:], axis=1)
    return [float(min(2.0, max(0.0, 1.0 - s))) for s in sims]


def compute_breakpoints(distances: list[float], config: SemanticChunkConfig) -> set[int]:
    """Indices i where a chunk boundary falls between sentences i and i+1.

    standard_deviation: break where d_i > mean + amount * population stddev.
    percentile: break where d_i > the ``amount`` quantile of the distances
    (linear interpolation).
    gradient: break where the rise into d_i exceeds the ``amount`` quantile
    of the distance differences.

    Comparisons are strict, so a flat distance profile yields no boundaries.
    """
    d = np.asarray(distances, dtype=np.float64).ravel()
    if d.size == 0:
        raise ValueError("compute_breakpoints requires a non-empty distance list")

    if config.method == "standard_deviation":
        threshold = float(d.mean() + config.amount * d.std())
        exceed = d > threshold
    elif config.method == "percentile":
        threshold = float(np.quantile(d, config.amount))
        exceed = d > threshold
    else:  # gradient
        if d.size < 2:
            return set()
        diffs = np.diff(d)
        # Align each difference with the index it rises into, front-padding
        # with the first value to keep the length at len(distances).
        rises = np.concatenate(([diffs[0]], diffs))
        threshold = float(np.quantile(rises, config.amount))
        exceed = rises > threshold

    return {int(i) for i in np.nonzero(exceed)[0]}


def _assemble(sentences: list[SentenceSpan], boundaries: set[int]) -> list[Chunk]:
    chunks: list[Chunk] = []
    run_start = 0
    for i in range(len(sentences)):
        if i in boundaries or i == len(sentences) - 1:
            run = sentences[run_start : i + 1]
            chunks.append(
                Chunk(
                    text=" ".join(s.text for s in run),
                    start_offset=run[0].start_offset,
                    end_offset=run[-1].end_offset,
                    chunk_index=len(chunks),
                )
            )
            run_start = i + 1
    return chunks


def semantic_chunk(
    text: str,
    config: SemanticChunkConfig,
    embed: EmbeddingClient,
) -> list[Chunk]:
    """Chunk text at semantic breakpoints; sentences are atomic units."""
    sentences = split_sentences(text)
    if not sentences:
        return []
    if len(sentences) == 1:
        return _assemble(sentences, set())
    distances = consecutive_distances(sentences, embed, config.buffer_size)
    boundaries = compute_breakpoints(distances, config)
    return _assemble(sentences, boundaries)


def _split_keeping_separator(text: str, separator: str) -> list[str]:
    if separator == "":
        return list(text)
    pieces: list[str] = []
    start = 0
    while True:
        hit = text.find(separator, start)
        if hit == -1:
            tail = text[start:]
            if tail:
                pieces.append(tail)
            return pieces
        pieces.append(text[start : hit + len(separator)])
        start = hit + len(separator)


def _recursive_pieces(text: str, chunk_size: int, separators: tuple[str, ...]) -> list[str]:
    for i, separator in enumerate(separators):
        if separator != "" and separator not in text:
            continue
        pieces = _split_keeping_separator(text, separator)
        if len(pieces) <= 1 and separator != "":
            continue
        remaining = separators[i + 1 :]
        out: list[str] = []
        for piece in pieces:
            if len(piece) > chunk_size and remaining:
                out.extend(_recursive_pieces(piece, chunk_size, remaining))
            else:
                out.append(piece)
        return out
    return [text]


def recursive_chunk(text: str, config: RecursiveChunkConfig) -> list[Chunk]:
    """Fixed-size splitting on a separator hierarchy with character overlap.

    Separators stay attached to the preceding piece, so chunks are exact
    substrings of the input and coverage is total. Each chunk after the
    first is prefixed with the final ``overlap`` characters of its
    predecessor (capped below the predecessor's full length so chunk starts
    stay strictly increasing).
    """
    if not text:
        return []
    if len(text) <= config.chunk_size:
        return [Chunk(text=text, start_offset=0, end_offset=len(text))]

    pieces = _recursive_pieces(text, config.chunk_size, _RECURSIVE_SEPARATORS)

    # Greedy merge into base chunks, tracked as (start, end) offsets.
    base: list[tuple[int, int]] = []
    acc_start = 0
    acc_len = 0
    offset = 0
    for piece in pieces:
        if acc_len and acc_len + len(piece) > config.chunk_size:
            base.append((acc_start, offset))
            acc_start = offset
            acc_len = 0
        acc_len += len(piece)
        offset += len(piece)
    if acc_len:
        base.append((acc_start, offset))

    chunks: list[Chunk] = []
    prev_start: int | None = None
    for start, end in base:
        prefix = 0
        if prev_start is not None:
            prev_len = start - prev_start
            prefix = min(config.overlap, prev_len - 1)
        chunk_start = start - prefix
        chunks.append(
            Chunk(
                text=text[chunk_start:end],
                start_offset=chunk_start,
                end_offset=end,
                chunk_index=len(chunks),
            )
        )
        prev_start = chunk_start
    return chunks
