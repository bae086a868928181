"""Segmentation: delimiter rules, span fidelity, round trips."""

import numpy as np
import pytest

from pis.errors import SubsequenceViolation
from pis.segmentation import (
    Sentence,
    detokenize,
    make_document,
    split_sentences,
    tokenize,
)


class TestSplitSentences:
    def test_two_sentences(self):
        texts = [s.text for s in split_sentences("Hi. Bye.")]
        assert texts == ["Hi.", "Bye."]

    def test_empty_input(self):
        assert split_sentences("") == []

    def test_abbreviation_splits_anyway(self):
        texts = [s.text for s in split_sentences("Mr. Smith went home.")]
        assert texts == ["Mr.", "Smith went home."]

    def test_newline_is_a_boundary(self):
        texts = [s.text for s in split_sentences("first line\nsecond line")]
        assert texts == ["first line", "second line"]

    def test_delimiter_runs_stay_attached(self):
        texts = [s.text for s in split_sentences("Really?! Yes; fine")]
        assert texts == ["Really?!", "Yes;", "fine"]

    def test_whitespace_only_segments_dropped(self):
        assert split_sentences(" \n  \n ") == []
        texts = [s.text for s in split_sentences("a.   \n  b.")]
        assert texts == ["a.", "b."]

    def test_trailing_text_without_delimiter(self):
        texts = [s.text for s in split_sentences("Done. trailing words")]
        assert texts == ["Done.", "trailing words"]

    def test_indices_contiguous(self):
        sentences = split_sentences("One. Two! Three?")
        assert [s.index for s in sentences] == [0, 1, 2]


class TestTokenize:
    def test_contraction_stays_whole(self):
        doc = make_document("d", "I'm Jack")
        tokens = doc.sentences[0].tokens
        assert [(t.text, t.kind) for t in tokens] == [("I'm", "word"), ("Jack", "word")]

    def test_punctuation_single_tokens(self):
        doc = make_document("d", "a,b")
        tokens = doc.sentences[0].tokens
        assert [(t.text, t.kind) for t in tokens] == [
            ("a", "word"),
            (",", "punctuation"),
            ("b", "word"),
        ]

    def test_whitespace_only(self):
        assert split_sentences("   ") == []

    def test_tokenize_matches_stored_tokens(self):
        doc = make_document("d", "Numbers like 42 and signs +- mix, don't they?")
        for sentence in doc.sentences:
            assert tokenize(sentence) == list(sentence.tokens)

    def test_underscore_is_punctuation(self):
        doc = make_document("d", "snake_case")
        kinds = [(t.text, t.kind) for t in doc.sentences[0].tokens]
        assert kinds == [
            ("snake", "word"),
            ("_", "punctuation"),
            ("case", "word"),
        ]


class TestDetokenize:
    def test_identity_round_trip(self):
        doc = make_document("d", "a, b")
        sentence = doc.sentences[0]
        assert detokenize(list(sentence.tokens), sentence) == "a, b"

    def test_join_rule(self):
        doc = make_document("d", "a x b")
        sentence = doc.sentences[0]
        kept = [sentence.tokens[0], sentence.tokens[2]]
        assert detokenize(kept, sentence) == "a b"

    def test_empty(self):
        doc = make_document("d", "something here")
        assert detokenize([], doc.sentences[0]) == ""

    def test_rejects_out_of_order(self):
        doc = make_document("d", "a b c")
        sentence = doc.sentences[0]
        with pytest.raises(SubsequenceViolation):
            detokenize([sentence.tokens[2], sentence.tokens[0]], sentence)

    def test_rejects_foreign_tokens(self):
        doc = make_document("d", "a b c")
        other = make_document("d", "x y z")
        with pytest.raises(SubsequenceViolation):
            detokenize([other.sentences[0].tokens[0]], doc.sentences[0])


def _random_text(rng: np.random.Generator) -> str:
    pieces = []
    vocabulary = ["cat", "Dog", "it's", "42", "a", "thing", "Mr", "council"]
    marks = [". ", "! ", "? ", "; ", "\n", ", ", " ", "  ", " - ", "..."]
    for _ in range(int(rng.integers(0, 40))):
        pieces.append(vocabulary[int(rng.integers(0, len(vocabulary)))])
        pieces.append(marks[int(rng.integers(0, len(marks)))])
    return "".join(pieces)


class TestInvariants:
    def test_span_fidelity_and_reconstruction_fuzz(self):
        rng = np.random.default_rng(1234)
        for _ in range(200):
            text = _random_text(rng)
            sentences = split_sentences(text)
            cursor = 0
            for sentence in sentences:
                start, end = sentence.char_span
                assert 0 <= start < end <= len(text)
                assert text[start:end] == sentence.text
                # everything between sentences is whitespace
                assert text[cursor:start].strip() == ""
                cursor = end
                for token in sentence.tokens:
                    t_start, t_end = token.char_span
                    assert sentence.text[t_start:t_end] == token.text
                    assert not any(ch.isspace() for ch in token.text)
            assert text[cursor:].strip() == ""

    def test_token_spans_disjoint_and_ordered(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            for sentence in split_sentences(_random_text(rng)):
                spans = [t.char_span for t in sentence.tokens]
                for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
                    assert e1 <= s2
                assert [t.index for t in sentence.tokens] == list(
                    range(len(sentence.tokens))
                )

    def test_round_trip_token_texts(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            for sentence in split_sentences(_random_text(rng)):
                rebuilt = detokenize(list(sentence.tokens), sentence)
                rebuilt_sentence = Sentence(
                    index=0, text=rebuilt, char_span=(0, len(rebuilt))
                )
                assert [t.text for t in tokenize(rebuilt_sentence)] == [
                    t.text for t in sentence.tokens
                ]

    def test_determinism(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            text = _random_text(rng)
            assert split_sentences(text) == split_sentences(text)
