"""Roulette dedup: similarity gate, escalating deletion odds, hard cap."""

import math

import numpy as np
import pytest

from pis.errors import DimensionError, RangeError, ZeroVector
from pis.segmentation import Sentence
from pis.sentence_sampler import (
    RouletteState,
    cosine_similarity,
    deletion_probability,
    filter_document,
    is_similar,
    roulette_step,
)


def _sentence(i):
    return Sentence(index=i, text=f"s{i}", char_span=(0, 2))


class TestCosineSimilarity:
    def test_identity(self):
        v = np.array([0.3, 0.4, 1.2])
        assert cosine_similarity(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 2.0])) == 0.0

    def test_forty_five_degrees(self):
        got = cosine_similarity(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
        assert got == pytest.approx(1 / math.sqrt(2))

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            cosine_similarity(np.zeros(3), np.array([1.0, 0.0, 0.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            cosine_similarity(np.ones(3), np.ones(4))

    def test_bounds(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            a = rng.normal(size=10)
            b = rng.normal(size=10)
            assert -1.0 - 1e-12 <= cosine_similarity(a, b) <= 1.0 + 1e-12


class TestIsSimilar:
    def test_empty_store(self):
        assert is_similar(np.array([1.0, 0.0]), RouletteState()) is False

    def test_threshold_inclusive(self):
        # cos([1,0], [9, sqrt(19)]) = 9 / sqrt(100) = 0.9 exactly
        state = RouletteState(stored=[(0, np.array([1.0, 0.0]))])
        at_threshold = np.array([9.0, math.sqrt(19.0)])
        assert cosine_similarity(at_threshold, np.array([1.0, 0.0])) == 0.9
        assert is_similar(at_threshold, state) is True

    def test_below_threshold(self):
        state = RouletteState(stored=[(0, np.array([1.0, 0.0]))])
        below = np.array([89.0, math.sqrt(10000.0 - 89.0**2)])
        assert cosine_similarity(below, np.array([1.0, 0.0])) == 0.89
        assert is_similar(below, state) is False


class TestDeletionProbability:
    def test_grid(self):
        assert deletion_probability(1) == pytest.approx(1 / 6)
        assert deletion_probability(3) == 0.5
        assert deletion_probability(6) == 1.0

    def test_out_of_range(self):
        for k in (0, 7, -1):
            with pytest.raises(RangeError):
                deletion_probability(k)


class TestRouletteStep:
    def test_dissimilar_kept_and_stored(self):
        state = RouletteState(stored=[(0, np.array([1.0, 0.0]))], k=3)
        rng = np.random.default_rng(0)
        decision = roulette_step(state, 1, np.array([0.0, 1.0]), rng)
        assert decision.kept and decision.draw is None
        assert state.k == 0
        assert len(state.stored) == 2

    def test_certain_deletion_at_k_six(self):
        emb = np.array([1.0, 0.0])
        for seed in range(20):
            state = RouletteState(stored=[(0, emb)], k=5)
            rng = np.random.default_rng(seed)
            decision = roulette_step(state, 1, emb, rng)
            assert not decision.kept
            assert decision.k_at_decision == 6
            assert state.k == 0

    def test_seeded_low_draw_deletes_at_k_one(self):
        emb = np.array([1.0, 0.0])
        # find a seed whose first uniform draw lands under 1/6
        seed = next(
            s for s in range(1000) if np.random.default_rng(s).random() < 1 / 6
        )
        state = RouletteState(stored=[(0, emb)], k=0)
        decision = roulette_step(state, 1, emb, np.random.default_rng(seed))
        assert not decision.kept
        assert decision.k_at_decision == 1
        assert decision.draw < 1 / 6
        assert state.k == 0 and len(state.stored) == 1

    def test_survivor_keeps_counter(self):
        emb = np.array([1.0, 0.0])
        seed = next(
            s for s in range(1000) if np.random.default_rng(s).random() > 1 / 6
        )
        state = RouletteState(stored=[(0, emb)], k=0)
        decision = roulette_step(state, 1, emb, np.random.default_rng(seed))
        assert decision.kept
        assert state.k == 1
        assert len(state.stored) == 2


class TestFilterDocument:
    def test_all_dissimilar_kept(self):
        basis = np.eye(5)
        items = [(_sentence(i), basis[i]) for i in range(5)]
        kept, log = filter_document(items, np.random.default_rng(1))
        assert [s.index for s in kept] == [0, 1, 2, 3, 4]
        assert all(d.kept for d in log)

    def test_empty(self):
        kept, log = filter_document([], np.random.default_rng(1))
        assert kept == [] and log == []

    def test_identical_stream_gets_a_deletion_within_six(self):
        emb = np.array([1.0, 2.0, 3.0])
        for seed in range(50):
            items = [(_sentence(i), emb) for i in range(8)]
            kept, log = filter_document(items, np.random.default_rng(seed))
            deleted = [d for d in log if not d.kept]
            assert deleted, f"seed {seed} produced no deletion"
            assert deleted[0].index <= 7
            # a run of 6 similar survivors is impossible
            streak = 0
            for decision in log[1:]:
                if decision.kept:
                    streak += 1
                    assert streak <= 5
                else:
                    streak = 0

    def test_kept_is_ordered_subsequence(self):
        rng = np.random.default_rng(4)
        emb_a = np.array([1.0, 0.0])
        emb_b = np.array([0.0, 1.0])
        items = [
            (_sentence(i), emb_a if i % 3 else emb_b) for i in range(12)
        ]
        kept, _ = filter_document(items, rng)
        indices = [s.index for s in kept]
        assert indices == sorted(indices)
        assert set(indices) <= set(range(12))

    def test_determinism_under_seed(self):
        emb = np.array([1.0, 1.0])
        items = [(_sentence(i), emb) for i in range(10)]
        first = filter_document(items, np.random.default_rng(42))
        second = filter_document(items, np.random.default_rng(42))
        assert [s.index for s in first[0]] == [s.index for s in second[0]]
        assert first[1] == second[1]

    def test_counter_resets_after_dissimilar(self):
        emb_a = np.array([1.0, 0.0])
        emb_b = np.array([0.0, 1.0])
        # similar similar | dissimilar | similar -> k at last decision must be 1
        state = RouletteState()
        rng = np.random.default_rng(123)
        roulette_step(state, 0, emb_a, rng)
        survivors = 0
        while True:  # force two similar survivors (retry seeds via fresh draws)
            decision = roulette_step(state, 1 + survivors, emb_a, rng)
            if decision.kept:
                survivors += 1
            if survivors == 2:
                break
        assert state.k >= 1
        roulette_step(state, 90, emb_b, rng)
        assert state.k == 0
        decision = roulette_step(state, 91, emb_a, rng)
        assert decision.k_at_decision == 1
