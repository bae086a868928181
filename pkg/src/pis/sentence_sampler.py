"""Russian-roulette sentence dedup.

Each sentence is compared (cosine similarity) against the embeddings of
sentences already kept.  The first near-duplicate faces a 1/6 deletion
chance; every further consecutive near-duplicate raises the stake by 1/6
until deletion is certain.  A dissimilar sentence, or an actual deletion,
resets the counter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, RangeError, ZeroVector
from .segmentation import Sentence

SIMILARITY_THRESHOLD = 0.9
MAX_ROULETTE_COUNTER = 6


@dataclass
class RouletteState:
    """Kept-sentence embeddings plus the consecutive-similarity counter k.

    ``stored`` is append-only while a document is being filtered; the private
    fields keep a contiguous, geometrically-grown copy of the embeddings so
    similarity checks are one matrix-vector product instead of a Python loop.
    """

    stored: list[tuple[int, np.ndarray]] = field(default_factory=list)
    k: int = 0
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)
    _norms: np.ndarray | None = field(default=None, repr=False, compare=False)
    _cached: int = field(default=0, repr=False, compare=False)

    def _sync_cache(self, dim: int) -> None:
        count = len(self.stored)
        stale = (
            self._matrix is None
            or self._matrix.shape[1] != dim
            or self._cached > count
        )
        if stale:
            capacity = max(8, 2 * count)
            self._matrix = np.empty((capacity, dim), dtype=np.float64)
            self._norms = np.empty(capacity, dtype=np.float64)
            self._cached = 0
        elif self._matrix.shape[0] < count:
            capacity = max(8, 2 * count)
            matrix = np.empty((capacity, dim), dtype=np.float64)
            norms = np.empty(capacity, dtype=np.float64)
            matrix[: self._cached] = self._matrix[: self._cached]
            norms[: self._cached] = self._norms[: self._cached]
            self._matrix, self._norms = matrix, norms
        for i in range(self._cached, count):
            embedding = np.asarray(self.stored[i][1], dtype=np.float64)
            if embedding.shape != (dim,):
                raise DimensionError(
                    f"stored embedding {i} has shape {embedding.shape}, expected ({dim},)"
                )
            self._matrix[i] = embedding
            self._norms[i] = np.linalg.norm(embedding)
        self._cached = count


@dataclass(frozen=True)
class RouletteDecision:
    """One log line of the roulette pass."""

    index: int
    k_at_decision: int
    draw: float | None
    kept: bool


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine similarity is undefined for zero vectors")
    return float(np.dot(a, b) / (norm_a * norm_b))


def is_similar(
    embedding: np.ndarray,
    state: RouletteState,
    threshold: float = SIMILARITY_THRESHOLD,
) -> bool:
    """True iff some stored embedding reaches the (inclusive) threshold."""
    if not state.stored:
        return False
    embedding = np.asarray(embedding, dtype=np.float64)
    if embedding.ndim != 1:
        raise DimensionError(f"embedding must be a vector, got shape {embedding.shape}")
    state._sync_cache(embedding.shape[0])
    count = len(state.stored)
    matrix = state._matrix[:count]
    norms = state._norms[:count]
    norm = np.linalg.norm(embedding)
    if norm == 0.0 or np.any(norms == 0.0):
        raise ZeroVector("cosine similarity is undefined for zero vectors")
    sims = (matrix @ embedding) / (norms * norm)
    return bool(np.max(sims) >= threshold)


def deletion_probability(k: int) -> float:
    """k/6 for k in [1, 6]."""
    if not 1 <= k <= MAX_ROULETTE_COUNTER:
        raise RangeError(f"k must be in [1, {MAX_ROULETTE_COUNTER}], got {k}")
    return k / MAX_ROULETTE_COUNTER


def roulette_step(
    state: RouletteState,
    index: int,
    embedding: np.ndarray,
    rng: np.random.Generator,
    threshold: float = SIMILARITY_THRESHOLD,
) -> RouletteDecision:
    """Decide keep/delete for one sentence and update ``state`` in place.

    Dissimilar sentences are kept, stored, and reset k.  Similar sentences
    bump k (capped at 6), then survive with probability 1 - k/6; a surviving
    similar sentence is stored with k left as-is, a deleted one is not stored
    and resets k.
    """
    if not is_similar(embedding, state, threshold):
        state.stored.append((index, np.asarray(embedding, dtype=np.float64)))
        state.k = 0
        return RouletteDecision(index=index, k_at_decision=0, draw=None, kept=True)

    state.k = min(state.k + 1, MAX_ROULETTE_COUNTER)
    k_at_decision = state.k
    draw = float(rng.random())
    if draw < deletion_probability(k_at_decision):
        state.k = 0
        return RouletteDecision(
            index=index, k_at_decision=k_at_decision, draw=draw, kept=False
        )
    state.stored.append((index, np.asarray(embedding, dtype=np.float64)))
    return RouletteDecision(
        index=index, k_at_decision=k_at_decision, draw=draw, kept=True
    )


def filter_document(
    sentences: list[tuple[Sentence, np.ndarray]],
    rng: np.random.Generator,
    threshold: float = SIMILARITY_THRESHOLD,
) -> tuple[list[Sentence], list[RouletteDecision]]:
    """Run the roulette over a document in order.

    Returns the kept sentences (original order preserved) and the full
    decision log.
    """
    state = RouletteState()
    kept: list[Sentence] = []
    log: list[RouletteDecision] = []
    for position, (sentence, embedding) in enumerate(sentences):
        decision = roulette_step(state, position, embedding, rng, threshold)
        log.append(decision)
        if decision.kept:
            kept.append(sentence)
    return kept, log
