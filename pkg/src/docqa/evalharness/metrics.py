"""Lexical and retrieval metrics: precision/recall/F1 at k, ROUGE-L, BLEU,
and refusal rate.

Conventions, stated so results are exactly reproducible:
- precision@k divides by k even when fewer than k results exist;
- F1 is the per-query harmonic mean (0 when both components are 0), and
  reports macro-average over queries;
- ROUGE-L and BLEU tokenize by lowercasing, stripping punctuation, and
  splitting on whitespace.
"""

from __future__ import annotations

import math
import string
from collections import Counter
from typing import Iterable, Sequence

_PUNCT_TABLE = str.maketrans({ch: " " for ch in string.punctuation})

BLEU_EPSILON = 1e-9


def tokenize(text: str) -> list[str]:
    return text.lower().translate(_PUNCT_TABLE).split()


def precision_recall_f1_at_k(
    retrieved: Sequence[str], relevant: set[str], k: int
) -> tuple[float, float, float]:
    """Macro-averaging building block for one query; relevant must be
    non-empty (callers exclude and count unjudged queries)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant:
        raise ValueError("relevant set must be non-empty")
    hits = len(set(retrieved[:k]) & relevant)
    precision = hits / k
    recall = hits / len(relevant)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: str, reference: str) -> dict[str, float]:
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return {"p": 0.0, "r": 0.0, "f": 0.0}
    lcs = lcs_length(cand, ref)
    p = lcs / len(cand)
    r = lcs / len(ref)
    f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return {"p": p, "r": r, "f": f}


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: str, reference: str, max_n: int = 4) -> float:
    """Geometric mean of modified n-gram precisions (n = 1..max_n) with
    add-epsilon smoothing on zero counts, times a brevity penalty."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_ngrams = _ngram_counts(cand, n)
        ref_ngrams = _ngram_counts(ref, n)
        total = sum(cand_ngrams.values())
        matched = sum(min(count, ref_ngrams[gram]) for gram, count in cand_ngrams.items())
        p_n = BLEU_EPSILON if (total == 0 or matched == 0) else matched / total
        log_sum += math.log(p_n)
    geo_mean = math.exp(log_sum / max_n)
    brevity = math.exp(1 - len(ref) / len(cand)) if len(cand) < len(ref) else 1.0
    return geo_mean * brevity


def refusal_rate(insufficient_flags: Iterable[bool]) -> float:
    flags = list(insufficient_flags)
    if not flags:
        raise ValueError("refusal_rate requires at least one answer")
    return sum(1 for flag in flags if flag) / len(flags)
