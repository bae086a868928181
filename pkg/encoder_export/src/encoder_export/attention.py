"""Aggregate raw attention tensors into per-word statistics.

A token's importance is read as the attention it *receives*: for every
(layer, head) the column mean of the row-stochastic attention matrix, then
the mean and population variance of that quantity across all (layer, head)
pairs.  Word-level scores average a word's subword pieces and are
renormalized over the sentence so the means sum to exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoverageError


def received_attention(tensor: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-subword received-attention mean and variance.

    ``tensor`` has shape (layers, heads, n, n) with row-stochastic matrices.
    Returns (mean, variance), each of shape (n,): the mean over query rows
    per (layer, head), then mean / population variance across (layer, head).
    """
    tensor = np.asarray(tensor, dtype=np.float64)
    if tensor.ndim != 4 or tensor.shape[2] != tensor.shape[3]:
        raise ValueError(f"expected (layers, heads, n, n), got {tensor.shape}")
    received = tensor.mean(axis=2)  # (layers, heads, n): column means
    flat = received.reshape(-1, tensor.shape[3])  # (layers*heads, n)
    return flat.mean(axis=0), flat.var(axis=0)


@dataclass(frozen=True)
class AlignmentMap:
    """Contiguous subword ranges per word over ``n_positions`` subwords.

    ``special_positions`` (sequence markers, padding) belong to no word; the
    word ranges must partition everything else, in order.
    """

    word_ranges: tuple[tuple[int, int], ...]
    n_positions: int
    special_positions: frozenset[int]

    def __post_init__(self):
        claimed: list[int] = []
        for start, end in self.word_ranges:
            if not 0 <= start < end <= self.n_positions:
                raise CoverageError(f"range [{start}, {end}) outside 0..{self.n_positions}")
            claimed.extend(range(start, end))
        if claimed != sorted(claimed):
            raise CoverageError("word ranges must be ordered and disjoint")
        expected = [
            p for p in range(self.n_positions) if p not in self.special_positions
        ]
        if claimed != expected:
            missing = sorted(set(expected) - set(claimed))
            extra = sorted(set(claimed) - set(expected))
            raise CoverageError(
                f"ranges must cover exactly the non-special positions "
                f"(missing {missing[:5]}, unexpected {extra[:5]})"
            )


def align_to_words(
    subword_means: np.ndarray,
    subword_variances: np.ndarray,
    alignment: AlignmentMap,
) -> tuple[np.ndarray, np.ndarray]:
    """Word-level attention means (renormalized to sum 1) and variances."""
    means = np.asarray(subword_means, dtype=np.float64)
    variances = np.asarray(subword_variances, dtype=np.float64)
    if means.shape != (alignment.n_positions,) or variances.shape != means.shape:
        raise ValueError("score arrays must match the alignment's position count")
    word_means = np.array(
        [means[start:end].mean() for start, end in alignment.word_ranges]
    )
    word_variances = np.array(
        [variances[start:end].mean() for start, end in alignment.word_ranges]
    )
    total = word_means.sum()
    if total <= 0:
        raise ValueError("word attention mass must be positive before renormalization")
    return word_means / total, word_variances
