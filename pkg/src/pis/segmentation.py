"""Deterministic sentence and word segmentation with exact character spans.

Sentences are maximal runs ending at one of ``. ! ? ;`` or a newline.  The
punctuation delimiter stays attached to its sentence; newlines and other
whitespace between sentences are treated as inter-sentence gaps, so the
original document text is always reconstructible from the spans.  The rule is
intentionally naive about abbreviations ("Mr. Smith" splits after "Mr.") --
that trade-off is accepted and documented rather than patched with heuristics.

Word tokens are maximal runs of letters, digits and apostrophes, so
contractions like "let's" survive as single tokens.  Every other non-space
character becomes a single punctuation token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SubsequenceViolation

SENTENCE_DELIMITERS = ".!?;"

# A word run (letters/digits, apostrophes allowed inside), else any single
# non-space character.  Underscore is deliberately excluded from word runs.
_TOKEN_RE = re.compile(r"(?:[^\W_]|')+|\S")


@dataclass(frozen=True)
class Token:
    """One word or punctuation mark, with its span inside the sentence."""

    text: str
    index: int
    char_span: tuple[int, int]
    kind: str  # "word" | "punctuation"

    @property
    def is_word(self) -> bool:
        return self.kind == "word"


@dataclass(frozen=True)
class Sentence:
    """A sentence with its half-open span into the owning document."""

    index: int
    text: str
    char_span: tuple[int, int]
    tokens: tuple[Token, ...] = field(default_factory=tuple)

    def word_tokens(self) -> list[Token]:
        return [t for t in self.tokens if t.is_word]

    def word_texts(self, fold_case: bool = False) -> list[str]:
        texts = [t.text for t in self.tokens if t.is_word]
        return [t.lower() for t in texts] if fold_case else texts


@dataclass(frozen=True)
class Document:
    """Raw text plus its sentence segmentation.

    ``reference`` and ``answer`` are optional gold fields carried through
    from corpus files for evaluation.
    """

    id: str
    text: str
    sentences: tuple[Sentence, ...]
    reference: str | None = None
    answer: str | None = None


def _scan_tokens(text: str) -> tuple[Token, ...]:
    spans: list[tuple[str, int, int, str]] = []
    for m in _TOKEN_RE.finditer(text):
        piece = m.group()
        if any(ch.isalnum() for ch in piece):
            spans.append((piece, m.start(), m.end(), "word"))
        elif len(piece) == 1:
            spans.append((piece, m.start(), m.end(), "punctuation"))
        else:
            # Run of bare apostrophes: no word content, emit marks one by one.
            for offset, ch in enumerate(piece):
                start = m.start() + offset
                spans.append((ch, start, start + 1, "punctuation"))
    return tuple(
        Token(text=t, index=i, char_span=(s, e), kind=k)
        for i, (t, s, e, k) in enumerate(spans)
    )


def split_sentences(text: str) -> list[Sentence]:
    """Split ``text`` into sentences with exact ``[start, end)`` spans.

    A sentence ends after a maximal run of delimiter characters, or before a
    newline.  Whitespace-only segments are dropped.  Total function: empty
    input yields an empty list.
    """
    segments: list[tuple[int, int]] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch in SENTENCE_DELIMITERS:
            j = i + 1
            while j < n and text[j] in SENTENCE_DELIMITERS:
                j += 1
            segments.append((start, j))
            start = j
            i = j
        elif ch == "\n":
            segments.append((start, i))
            start = i + 1
            i += 1
        else:
            i += 1
    if start < n:
        segments.append((start, n))

    sentences: list[Sentence] = []
    for seg_start, seg_end in segments:
        while seg_start < seg_end and text[seg_start].isspace():
            seg_start += 1
        while seg_end > seg_start and text[seg_end - 1].isspace():
            seg_end -= 1
        if seg_start == seg_end:
            continue
        sentence_text = text[seg_start:seg_end]
        sentences.append(
            Sentence(
                index=len(sentences),
                text=sentence_text,
                char_span=(seg_start, seg_end),
                tokens=_scan_tokens(sentence_text),
            )
        )
    return sentences


def tokenize(sentence: Sentence) -> list[Token]:
    """Word/punctuation tokens of ``sentence``, recomputed from its text."""
    return list(_scan_tokens(sentence.text))


def detokenize(tokens: list[Token], original_sentence: Sentence) -> str:
    """Join a kept subsequence of ``original_sentence``'s tokens back into text.

    Word tokens are separated by single spaces; punctuation attaches to the
    preceding token with no space.  Raises :class:`SubsequenceViolation` when
    ``tokens`` is not an index-increasing subsequence of the original.
    """
    original = original_sentence.tokens
    last = -1
    for token in tokens:
        if token.index <= last or token.index >= len(original):
            raise SubsequenceViolation(
                f"token index {token.index} breaks the subsequence order"
            )
        if original[token.index] != token:
            raise SubsequenceViolation(
                f"token at index {token.index} does not match the original sentence"
            )
        last = token.index

    parts: list[str] = []
    for token in tokens:
        if not parts or token.kind == "punctuation":
            parts.append(token.text)
        else:
            parts.append(" " + token.text)
    return "".join(parts)


def make_document(
    doc_id: str,
    text: str,
    reference: str | None = None,
    answer: str | None = None,
) -> Document:
    """Build a :class:`Document` by segmenting ``text``."""
    return Document(
        id=doc_id,
        text=text,
        sentences=tuple(split_sentences(text)),
        reference=reference,
        answer=answer,
    )
