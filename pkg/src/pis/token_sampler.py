"""Token-level importance sampling: delete high-variance tokens first.

Given per-token scores, a target removal ratio r deletes exactly
min(floor(r * n_words), n_words - 1) word tokens, highest deletion priority
first, where priority = attention_variance / (weight + eps).  High corrective
weight therefore protects a token even when its attention is noisy.
Punctuation survives unless orphaned (every adjacent word deleted).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .segmentation import Sentence, Token, detokenize, _scan_tokens
from .scoring import ScoredSentence, TokenScore

MAX_REMOVE_RATIO = 0.8
DEFAULT_PRIORITY_EPS = 1e-6

# Guards floor() against float grid ratios like 0.3 * 10 == 2.9999999999999996.
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class CompressionPlan:
    """Outcome of compressing one sentence."""

    ratio_remove: float
    deleted_indices: frozenset[int]
    kept_tokens: tuple[Token, ...]

    def kept_word_count(self) -> int:
        return sum(1 for t in self.kept_tokens if t.is_word)


def deletion_priority(score: TokenScore, eps: float = DEFAULT_PRIORITY_EPS) -> float:
    """attention_variance / (weight + eps); larger means deleted earlier."""
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    return score.attention_variance / (score.weight + eps)


def compress_sentence(
    scored: ScoredSentence,
    ratio_remove: float,
    eps: float = DEFAULT_PRIORITY_EPS,
) -> CompressionPlan:
    """Delete word tokens to hit ``ratio_remove``, never emptying the sentence.

    Ties in priority delete the higher token index first.  A punctuation token
    is dropped only when every word token adjacent to it (nearest on each
    side, where one exists) was deleted.
    """
    if not 0.0 <= ratio_remove <= MAX_REMOVE_RATIO:
        raise DomainError(
            f"ratio_remove must be in [0, {MAX_REMOVE_RATIO}], got {ratio_remove}"
        )
    tokens = scored.sentence.tokens
    word_positions = [t.index for t in tokens if t.is_word]
    n_words = len(word_positions)
    if n_words == 0:
        raise DomainError("cannot compress a sentence with no word tokens")

    n_delete = min(int(math.floor(ratio_remove * n_words + _FLOOR_GUARD)), n_words - 1)

    # scores align 1:1 with word tokens
    priorities = [deletion_priority(s, eps) for s in scored.scores]
    order = sorted(
        range(n_words),
        key=lambda w: (-priorities[w], -word_positions[w]),
    )
    deleted_words = {word_positions[w] for w in order[:n_delete]}

    deleted = set(deleted_words)
    for token in tokens:
        if token.is_word:
            continue
        previous_word = next(
            (p for p in reversed(word_positions) if p < token.index), None
        )
        next_word = next((p for p in word_positions if p > token.index), None)
        previous_gone = previous_word is None or previous_word in deleted_words
        next_gone = next_word is None or next_word in deleted_words
        if previous_gone and next_gone:
            deleted.add(token.index)

    kept = tuple(t for t in tokens if t.index not in deleted)
    return CompressionPlan(
        ratio_remove=ratio_remove,
        deleted_indices=frozenset(deleted),
        kept_tokens=kept,
    )


def achieved_rho(plan: CompressionPlan, original_word_count: int) -> float:
    """Kept-word fraction in (0, 1]."""
    if original_word_count < 1:
        raise DomainError("original_word_count must be >= 1")
    return plan.kept_word_count() / original_word_count


def plan_to_sentence(original: Sentence, plan: CompressionPlan) -> Sentence:
    """Materialize the surviving tokens as a standalone sentence."""
    text = detokenize(list(plan.kept_tokens), original)
    return Sentence(
        index=original.index,
        text=text,
        char_span=(0, len(text)),
        tokens=_scan_tokens(text),
    )
