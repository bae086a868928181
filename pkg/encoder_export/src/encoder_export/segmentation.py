"""Sentence splitting and word tokenization, matching the consumer's contract.

The compression library that reads our records segments text with the same
rules: sentences end after a maximal run of ``. ! ? ;`` or before a newline,
whitespace-only segments are dropped, and word tokens are maximal runs of
letters/digits/apostrophes.  Re-implemented here (rather than imported) so
the only coupling between the tools is the record file format itself.
"""

from __future__ import annotations

import re

SENTENCE_DELIMITERS = ".!?;"

_WORD_RE = re.compile(r"(?:[^\W_]|')+")


def split_sentences(text: str) -> list[str]:
    """Sentence texts in order; indices into this list are record keys."""
    segments: list[str] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch in SENTENCE_DELIMITERS:
            j = i + 1
            while j < n and text[j] in SENTENCE_DELIMITERS:
                j += 1
            segments.append(text[start:j])
            start = j
            i = j
        elif ch == "\n":
            segments.append(text[start:i])
            start = i + 1
            i += 1
        else:
            i += 1
    if start < n:
        segments.append(text[start:n])
    return [segment.strip() for segment in segments if segment.strip()]


def word_tokens(sentence: str) -> list[str]:
    """Word tokens (letters/digits/apostrophe runs containing an alnum)."""
    return [m.group() for m in _WORD_RE.finditer(sentence) if any(c.isalnum() for c in m.group())]
