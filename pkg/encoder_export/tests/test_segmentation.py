"""The re-implemented segmentation contract."""

from encoder_export.segmentation import split_sentences, word_tokens


class TestSplitSentences:
    def test_delimiters(self):
        assert split_sentences("Hi. Bye.") == ["Hi.", "Bye."]
        assert split_sentences("Mr. Smith went home.") == ["Mr.", "Smith went home."]
        assert split_sentences("") == []
        assert split_sentences("a\nb") == ["a", "b"]
        assert split_sentences("Really?! Yes; fine") == ["Really?!", "Yes;", "fine"]

    def test_whitespace_dropped(self):
        assert split_sentences("  \n \n") == []


class TestWordTokens:
    def test_words_and_punctuation(self):
        assert word_tokens("I'm Jack") == ["I'm", "Jack"]
        assert word_tokens("a,b") == ["a", "b"]
        assert word_tokens("?!") == []
        assert word_tokens("snake_case") == ["snake", "case"]
