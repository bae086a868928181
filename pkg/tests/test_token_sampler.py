"""Token sampler: deletion counts, priority ordering, punctuation orphans."""

import numpy as np
import pytest

from pis.errors import DomainError
from pis.scoring import ScoredSentence, TokenScore
from pis.segmentation import make_document
from pis.token_sampler import (
    achieved_rho,
    compress_sentence,
    deletion_priority,
    plan_to_sentence,
)


def _score(variance, weight):
    return TokenScore(
        attention_mean=0.1,
        attention_variance=variance,
        tf=1,
        tf_share=0.5,
        idf=1.0,
        weight=weight,
    )


def _scored(text, variances=None, weights=None):
    sentence = make_document("d", text).sentences[0]
    words = sentence.word_tokens()
    variances = variances if variances is not None else [0.1] * len(words)
    weights = weights if weights is not None else [0.5] * len(words)
    scores = tuple(_score(v, w) for v, w in zip(variances, weights))
    embedding = np.zeros(768)
    return ScoredSentence(sentence=sentence, scores=scores, embedding=embedding)


class TestDeletionPriority:
    def test_zero_variance(self):
        assert deletion_priority(_score(0.0, 0.4)) == 0.0

    def test_hand_value(self):
        assert deletion_priority(_score(0.4, 0.2), eps=1e-6) == pytest.approx(2.0, rel=1e-4)

    def test_monotone_in_variance(self):
        low = deletion_priority(_score(0.1, 0.3))
        high = deletion_priority(_score(0.2, 0.3))
        assert high > low

    def test_eps_must_be_positive(self):
        with pytest.raises(DomainError):
            deletion_priority(_score(0.1, 0.1), eps=0.0)


class TestCompressSentence:
    def test_ratio_zero_is_identity(self):
        scored = _scored("keep every single word here.")
        plan = compress_sentence(scored, 0.0)
        assert plan.deleted_indices == frozenset()
        assert plan.kept_tokens == scored.sentence.tokens

    def test_ten_words_ratio_point_one(self):
        scored = _scored("one two three four five six seven eight nine ten")
        plan = compress_sentence(scored, 0.1)
        assert plan.kept_word_count() == 9
        assert achieved_rho(plan, 10) == pytest.approx(0.9)

    def test_single_word_never_deleted(self):
        scored = _scored("word")
        plan = compress_sentence(scored, 0.8)
        assert plan.kept_word_count() == 1
        assert plan.deleted_indices == frozenset()

    def test_ratio_out_of_range(self):
        scored = _scored("a b c")
        with pytest.raises(DomainError):
            compress_sentence(scored, 0.81)
        with pytest.raises(DomainError):
            compress_sentence(scored, -0.1)

    def test_highest_priority_deleted_first(self):
        scored = _scored("alpha beta gamma", variances=[0.9, 0.1, 0.5], weights=[0.1, 0.1, 0.1])
        plan = compress_sentence(scored, 0.4)  # floor(0.4 * 3) = 1 deletion
        assert [t.text for t in plan.kept_tokens] == ["beta", "gamma"]

    def test_high_weight_protects(self):
        scored = _scored("alpha beta", variances=[0.5, 0.5], weights=[5.0, 0.01])
        plan = compress_sentence(scored, 0.5)  # one deletion
        assert [t.text for t in plan.kept_tokens] == ["alpha"]

    def test_tie_breaks_delete_higher_index_first(self):
        scored = _scored("one two three four", variances=[0.2] * 4, weights=[0.3] * 4)
        plan = compress_sentence(scored, 0.5)  # 2 deletions, all tied
        assert [t.text for t in plan.kept_tokens] == ["one", "two"]

    def test_count_exact_exhaustive(self):
        for n in range(1, 51):
            text = " ".join(f"w{i}" for i in range(n))
            scored = _scored(text)
            for grid in range(0, 9):
                ratio = grid / 10.0
                plan = compress_sentence(scored, ratio)
                expected_deleted = min(grid * n // 10, n - 1)
                assert n - plan.kept_word_count() == expected_deleted, (n, ratio)

    def test_order_preserved_subsequence(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            n = int(rng.integers(1, 20))
            text = " ".join(f"w{i}" for i in range(n))
            scored = _scored(
                text,
                variances=list(rng.uniform(0, 1, n)),
                weights=list(rng.uniform(0, 1, n)),
            )
            plan = compress_sentence(scored, float(rng.integers(0, 9)) / 10.0)
            indices = [t.index for t in plan.kept_tokens]
            assert indices == sorted(indices)
            assert plan.kept_word_count() >= 1

    def test_priority_correctness_by_resort(self):
        rng = np.random.default_rng(33)
        for _ in range(100):
            n = int(rng.integers(2, 15))
            text = " ".join(f"w{i}" for i in range(n))
            variances = list(rng.uniform(0, 1, n))
            weights = list(rng.uniform(0, 1, n))
            scored = _scored(text, variances=variances, weights=weights)
            plan = compress_sentence(scored, 0.5)
            priorities = {
                token.index: deletion_priority(score)
                for token, score in zip(scored.sentence.word_tokens(), scored.scores)
            }
            kept_words = {t.index for t in plan.kept_tokens if t.is_word}
            deleted_words = set(priorities) - kept_words
            for d in deleted_words:
                for k in kept_words:
                    assert priorities[d] > priorities[k] or (
                        priorities[d] == priorities[k] and d > k
                    )

    def test_punctuation_kept_with_surviving_neighbor(self):
        scored = _scored("alpha, beta", variances=[0.9, 0.1], weights=[0.1, 0.1])
        plan = compress_sentence(scored, 0.5)  # deletes alpha
        assert [t.text for t in plan.kept_tokens] == [",", "beta"] or [
            t.text for t in plan.kept_tokens
        ] == ["beta"]
        # comma's right neighbor survives, so comma must survive
        assert "," in [t.text for t in plan.kept_tokens]

    def test_punctuation_orphaned_on_both_sides_deleted(self):
        # "alpha, beta stays." deleting alpha and beta orphans the comma
        scored = _scored(
            "alpha, beta stays here now", variances=[0.9, 0.8, 0.0, 0.0, 0.0], weights=[0.1] * 5
        )
        plan = compress_sentence(scored, 0.4)  # floor(0.4*5)=2 deletions: alpha, beta
        texts = [t.text for t in plan.kept_tokens]
        assert texts == ["stays", "here", "now"]

    def test_trailing_punctuation_follows_last_word(self):
        scored = _scored("alpha beta.", variances=[0.1, 0.9], weights=[0.1, 0.1])
        plan = compress_sentence(scored, 0.5)  # deletes beta
        assert [t.text for t in plan.kept_tokens] == ["alpha"]


class TestAchievedRho:
    def test_examples(self):
        scored = _scored(" ".join(f"w{i}" for i in range(10)))
        plan = compress_sentence(scored, 0.1)
        assert achieved_rho(plan, 10) == pytest.approx(0.9)
        identity = compress_sentence(scored, 0.0)
        assert achieved_rho(identity, 10) == 1.0

    def test_three_x(self):
        scored = _scored(" ".join(f"w{i}" for i in range(9)))
        plan = compress_sentence(scored, 0.7)  # floor(6.3) = 6 deleted, 3 kept
        assert achieved_rho(plan, 9) == pytest.approx(1 / 3)

    def test_zero_count_rejected(self):
        scored = _scored("a b")
        plan = compress_sentence(scored, 0.0)
        with pytest.raises(DomainError):
            achieved_rho(plan, 0)


class TestPlanToSentence:
    def test_round_trip_text(self):
        scored = _scored("alpha, beta gamma.")
        plan = compress_sentence(scored, 0.0)
        rebuilt = plan_to_sentence(scored.sentence, plan)
        assert rebuilt.text == "alpha, beta gamma."
        assert [t.text for t in rebuilt.tokens] == [t.text for t in scored.sentence.tokens]

    def test_word_texts_match_plan(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(1, 12))
            text = " ".join(f"w{i}" for i in range(n)) + "."
            scored = _scored(
                text, variances=list(rng.uniform(0, 1, n)), weights=list(rng.uniform(0, 1, n))
            )
            plan = compress_sentence(scored, 0.5)
            rebuilt = plan_to_sentence(scored.sentence, plan)
            assert rebuilt.word_texts() == [t.text for t in plan.kept_tokens if t.is_word]
