"""Self-contained text-overlap metrics: ROUGE-1/2/L, BLEU, exact match.

All functions operate on pre-tokenized sequences so rewards and evaluation
share one tokenization (word tokens from :mod:`pis.segmentation`).
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float


ZERO_PRF = PrfScore(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class MetricReport:
    """One row of the evaluation table.  ``None`` marks an undefined metric."""

    em: float | None = None
    bleu: float | None = None
    rouge1: PrfScore | None = None
    rouge2: PrfScore | None = None
    rougeL: PrfScore | None = None
    compression_tau: float | None = None
    inv_tau: float | None = None


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _prf(overlap: float, n_candidate: int, n_reference: int) -> PrfScore:
    precision = overlap / n_candidate if n_candidate else 0.0
    recall = overlap / n_reference if n_reference else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return PrfScore(precision, recall, f1)


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> PrfScore:
    """Clipped n-gram overlap (n in {1, 2}) as precision/recall/F1."""
    if n not in (1, 2):
        raise DomainError(f"rouge_n supports n in {{1, 2}}, got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return _prf(overlap, sum(cand.values()), sum(ref.values()))


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        row = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                row.append(prev[j - 1] + 1)
            else:
                row.append(max(prev[j], row[-1]))
        prev = row
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> PrfScore:
    """Longest-common-subsequence overlap as precision/recall/F1."""
    lcs = _lcs_length(candidate, reference)
    return _prf(lcs, len(candidate), len(reference))


def bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int = 4) -> float:
    """Smoothed sentence BLEU.

    Geometric mean of modified n-gram precisions for n = 1..max_n.  Orders
    with zero matches get add-one smoothing ((m+1)/(t+1)); this keeps short
    extractive candidates, which rarely share 3- or 4-grams with their
    reference, away from a hard zero.  Brevity penalty exp(1 - |ref|/|cand|)
    applies when the candidate is shorter than the reference.
    """
    if not candidate:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        total = sum(cand.values())
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        if matches == 0:
            precision = (matches + 1.0) / (total + 1.0)
        else:
            precision = matches / total
        log_sum += math.log(precision)
    geometric_mean = math.exp(log_sum / max_n)
    if len(candidate) < len(reference):
        brevity = math.exp(1.0 - len(reference) / len(candidate))
    else:
        brevity = 1.0
    return brevity * geometric_mean


_PUNCT_RE = re.compile(r"[^\w\s]|_")
_ARTICLES = ("a", "an", "the")


def _normalize_answer(text: str) -> str:
    words = _PUNCT_RE.sub(" ", text.lower()).split()
    if words and words[0] in _ARTICLES:
        words = words[1:]
    return " ".join(words)


def exact_match(prediction: str, gold: str) -> int:
    """1 iff the normalized strings are equal.

    Normalization: lowercase, strip punctuation, collapse whitespace, drop a
    leading article (a / an / the).
    """
    return int(_normalize_answer(prediction) == _normalize_answer(gold))


def compression_ratio(original_tokens: int, compressed_tokens: int) -> tuple[float, float]:
    """Return (tau, 1/tau) where tau = compressed / original token counts."""
    if original_tokens < 1 or compressed_tokens < 1:
        raise DomainError(
            f"token counts must be >= 1, got {original_tokens} -> {compressed_tokens}"
        )
    tau = compressed_tokens / original_tokens
    return tau, original_tokens / compressed_tokens
