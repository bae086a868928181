"""Per-token importance statistics and sentence embeddings.

Two interchangeable backends feed the sampler:

* cached encoder records (JSON Lines produced by an external export tool)
  carrying attention means/variances and a 768-dim sentence embedding;
* a deterministic fallback scorer that needs no model: token salience is a
  softmax of idf * log-length, and the embedding is an L2-normalized
  768-bucket hash histogram of the sentence's word tokens.

Either way, each word token ends up with the corrective weight

    weight = attention_mean * tf_share^gamma_tf * idf

which protects high-attention, high-frequency terms from deletion.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    AlignmentError,
    DomainError,
    DuplicateKey,
    EmptySentence,
    NormalizationError,
    ParseError,
    SchemaError,
)
from .segmentation import Document, Sentence, Token

EMBEDDING_DIM = 768
DEFAULT_GAMMA_TF = 0.5

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class TokenScore:
    """Importance statistics for one word token."""

    attention_mean: float
    attention_variance: float
    tf: int
    tf_share: float
    idf: float
    weight: float


@dataclass(eq=False)
class ScoredSentence:
    """A sentence, its word-token scores (aligned 1:1), and its embedding."""

    sentence: Sentence
    scores: tuple[TokenScore, ...]
    embedding: np.ndarray


@dataclass(frozen=True)
class EncoderRecord:
    """One line of an encoder-record file."""

    doc_id: str
    sentence_index: int
    tokens: tuple[str, ...]
    attention_mean: tuple[float, ...]
    attention_variance: tuple[float, ...]
    embedding: np.ndarray


@dataclass
class CorpusStats:
    """Document counts backing idf.

    For a single-document corpus each sentence counts as one "document" so
    idf stays non-degenerate.
    """

    doc_count: int
    doc_frequency: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_documents(cls, documents: Iterable[Document]) -> "CorpusStats":
        documents = list(documents)
        if len(documents) == 1:
            units: list[set[str]] = [
                {t.text.lower() for t in sentence.tokens if t.is_word}
                for sentence in documents[0].sentences
            ]
        else:
            units = [
                {
                    t.text.lower()
                    for sentence in doc.sentences
                    for t in sentence.tokens
                    if t.is_word
                }
                for doc in documents
            ]
        frequency: Counter = Counter()
        for terms in units:
            frequency.update(terms)
        return cls(doc_count=max(1, len(units)), doc_frequency=dict(frequency))


def compute_tf(tokens: list[Token]) -> tuple[dict[str, int], dict[str, float]]:
    """Case-folded term counts and per-term share of the sentence's word mass.

    Returns ``(tf, tf_share)`` where ``tf_share[term] = tf[term] / n_words``.
    """
    words = [t.text.lower() for t in tokens if t.is_word]
    if not words:
        raise EmptySentence("compute_tf needs at least one word token")
    counts = dict(Counter(words))
    total = len(words)
    shares = {term: count / total for term, count in counts.items()}
    return counts, shares


def compute_idf(stats: CorpusStats, term: str) -> float:
    """Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1, df=0 if unseen."""
    df = stats.doc_frequency.get(term.lower(), 0)
    return math.log((1 + stats.doc_count) / (1 + df)) + 1.0


def corrective_weight(
    attention_mean: float, tf_share: float, idf: float, gamma_tf: float
) -> float:
    """attention_mean * tf_share^gamma_tf * idf."""
    if tf_share <= 0:
        raise DomainError(f"tf_share must be positive, got {tf_share}")
    return attention_mean * tf_share**gamma_tf * idf


def fnv1a_64(text: str) -> int:
    """64-bit FNV-1a hash of the UTF-8 encoding of ``text``."""
    digest = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        digest ^= byte
        digest = (digest * _FNV_PRIME) & _U64_MASK
    return digest


def _hash_embedding(word_texts: list[str]) -> np.ndarray:
    buckets = np.zeros(EMBEDDING_DIM, dtype=np.float64)
    for word in word_texts:
        buckets[fnv1a_64(word.lower()) % EMBEDDING_DIM] += 1.0
    norm = np.linalg.norm(buckets)
    if norm > 0:
        buckets /= norm
    return buckets


def fallback_scores(
    sentence: Sentence,
    stats: CorpusStats,
    gamma_tf: float = DEFAULT_GAMMA_TF,
) -> ScoredSentence:
    """Deterministic model-free scorer.

    attention_mean is a softmax over word tokens of idf * ln(1 + len(token));
    variance is the Bernoulli-style mean*(1-mean); the embedding is the
    hash-bucket histogram described in the module docstring.
    """
    words = sentence.word_tokens()
    if not words:
        raise EmptySentence(f"sentence {sentence.index} has no word tokens")
    tf, shares = compute_tf(list(sentence.tokens))

    idfs = [compute_idf(stats, t.text) for t in words]
    logits = np.array(
        [idf * math.log(1.0 + len(t.text)) for idf, t in zip(idfs, words)],
        dtype=np.float64,
    )
    logits -= logits.max()
    exp = np.exp(logits)
    attention = exp / exp.sum()

    scores = []
    for i, token in enumerate(words):
        term = token.text.lower()
        mean = float(attention[i])
        scores.append(
            TokenScore(
                attention_mean=mean,
                attention_variance=mean * (1.0 - mean),
                tf=tf[term],
                tf_share=shares[term],
                idf=idfs[i],
                weight=corrective_weight(mean, shares[term], idfs[i], gamma_tf),
            )
        )
    embedding = _hash_embedding([t.text for t in words])
    return ScoredSentence(sentence=sentence, scores=tuple(scores), embedding=embedding)


_RECORD_FIELDS = {
    "doc_id",
    "sentence_index",
    "tokens",
    "attention_mean",
    "attention_variance",
    "embedding",
}

ATTENTION_SUM_TOLERANCE = 1e-4


def _as_float_list(value: object, field_name: str) -> list[float]:
    if not isinstance(value, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        raise SchemaError(f"'{field_name}' must be a list of numbers", field=field_name)
    return [float(x) for x in value]


def _validate_record(raw: object, line_no: int) -> EncoderRecord:
    if not isinstance(raw, dict):
        raise SchemaError("record must be a JSON object", field=None)
    extra = set(raw) - _RECORD_FIELDS
    if extra:
        raise SchemaError(f"unexpected field '{sorted(extra)[0]}'", field=sorted(extra)[0])
    missing = _RECORD_FIELDS - set(raw)
    if missing:
        raise SchemaError(f"missing field '{sorted(missing)[0]}'", field=sorted(missing)[0])

    if not isinstance(raw["doc_id"], str):
        raise SchemaError("'doc_id' must be a string", field="doc_id")
    sentence_index = raw["sentence_index"]
    if isinstance(sentence_index, bool) or not isinstance(sentence_index, int) or sentence_index < 0:
        raise SchemaError("'sentence_index' must be a non-negative integer", field="sentence_index")
    tokens = raw["tokens"]
    if (
        not isinstance(tokens, list)
        or not tokens
        or not all(isinstance(t, str) for t in tokens)
    ):
        raise SchemaError("'tokens' must be a non-empty list of strings", field="tokens")

    attention_mean = _as_float_list(raw["attention_mean"], "attention_mean")
    attention_variance = _as_float_list(raw["attention_variance"], "attention_variance")
    embedding = _as_float_list(raw["embedding"], "embedding")

    if len(attention_mean) != len(tokens) or len(attention_variance) != len(tokens):
        raise SchemaError(
            "'tokens', 'attention_mean' and 'attention_variance' must have equal length",
            field="attention_mean",
        )
    if len(embedding) != EMBEDDING_DIM:
        raise SchemaError(
            f"'embedding' must have exactly {EMBEDDING_DIM} entries, got {len(embedding)}",
            field="embedding",
        )
    if any(v < 0 for v in attention_variance):
        raise SchemaError("'attention_variance' entries must be >= 0", field="attention_variance")
    total = math.fsum(attention_mean)
    if abs(total - 1.0) > ATTENTION_SUM_TOLERANCE:
        raise NormalizationError(
            f"line {line_no}: attention_mean sums to {total:.6f}, expected 1 +/- {ATTENTION_SUM_TOLERANCE}"
        )
    return EncoderRecord(
        doc_id=raw["doc_id"],
        sentence_index=sentence_index,
        tokens=tuple(tokens),
        attention_mean=tuple(attention_mean),
        attention_variance=tuple(attention_variance),
        embedding=np.array(embedding, dtype=np.float64),
    )


def load_encoder_records(path: str | os.PathLike) -> dict[tuple[str, int], EncoderRecord]:
    """Load and validate an encoder-record JSON Lines file."""
    records: dict[tuple[str, int], EncoderRecord] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_no=line_no) from exc
            record = _validate_record(raw, line_no)
            key = (record.doc_id, record.sentence_index)
            if key in records:
                raise DuplicateKey(f"line {line_no}: duplicate record for {key}")
            records[key] = record
    return records


def score_sentence(
    sentence: Sentence,
    record: EncoderRecord | None,
    stats: CorpusStats,
    gamma_tf: float = DEFAULT_GAMMA_TF,
) -> ScoredSentence:
    """Score one sentence from a cached record, or fall back to the hash scorer.

    Record tokens must match the sentence's word tokens case-insensitively;
    the first mismatching position is reported in :class:`AlignmentError`.
    """
    if record is None:
        return fallback_scores(sentence, stats, gamma_tf)

    words = sentence.word_tokens()
    if not words:
        raise EmptySentence(f"sentence {sentence.index} has no word tokens")
    for i in range(min(len(words), len(record.tokens))):
        if words[i].text.lower() != record.tokens[i].lower():
            raise AlignmentError(
                f"token {i}: sentence has {words[i].text!r}, record has {record.tokens[i]!r}",
                token_index=i,
            )
    if len(words) != len(record.tokens):
        raise AlignmentError(
            f"sentence has {len(words)} word tokens, record has {len(record.tokens)}",
            token_index=min(len(words), len(record.tokens)),
        )

    tf, shares = compute_tf(list(sentence.tokens))
    scores = []
    for i, token in enumerate(words):
        term = token.text.lower()
        idf = compute_idf(stats, term)
        mean = record.attention_mean[i]
        scores.append(
            TokenScore(
                attention_mean=mean,
                attention_variance=record.attention_variance[i],
                tf=tf[term],
                tf_share=shares[term],
                idf=idf,
                weight=corrective_weight(mean, shares[term], idf, gamma_tf),
            )
        )
    return ScoredSentence(
        sentence=sentence,
        scores=tuple(scores),
        embedding=np.array(record.embedding, dtype=np.float64),
    )


class Scorer:
    """Bound scoring backend: corpus stats plus optional encoder records."""

    def __init__(
        self,
        stats: CorpusStats,
        records: Mapping[tuple[str, int], EncoderRecord] | None = None,
        gamma_tf: float = DEFAULT_GAMMA_TF,
    ):
        self.stats = stats
        self.records = records or {}
        self.gamma_tf = gamma_tf

    def score(self, doc_id: str, sentence: Sentence) -> ScoredSentence:
        record = self.records.get((doc_id, sentence.index))
        return score_sentence(sentence, record, self.stats, self.gamma_tf)

    def score_document(self, document: Document) -> list[ScoredSentence]:
        """Scores for every sentence that has at least one word token."""
        return [
            self.score(document.id, sentence)
            for sentence in document.sentences
            if any(t.is_word for t in sentence.tokens)
        ]
