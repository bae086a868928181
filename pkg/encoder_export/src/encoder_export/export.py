"""Run an encoder over a corpus and emit one record per sentence.

Output is JSON Lines; each line carries the sentence's word tokens, their
received-attention means (summing to 1) and variances aggregated over every
(layer, head), and the sentence embedding (mean of last-layer hidden states
over non-special positions).  The format is the compression library's
encoder-record contract, so files written here load there unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .attention import AlignmentMap, align_to_words, received_attention
from .errors import CorpusError, ModelLoadError, TokenizationError
from .segmentation import split_sentences, word_tokens

EMBEDDING_DIM = 768


@dataclass(frozen=True)
class SentenceTask:
    doc_id: str
    sentence_index: int
    words: tuple[str, ...]


def load_encoder(model_id: str):
    """Load tokenizer and model in eager-attention eval mode."""
    try:
        import torch
        from transformers import AutoModel, AutoTokenizer
    except ImportError as exc:  # pragma: no cover
        raise ModelLoadError(f"torch/transformers unavailable: {exc}") from exc
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id, attn_implementation="eager")
    except Exception as exc:
        raise ModelLoadError(f"cannot load encoder '{model_id}': {exc}") from exc
    if not tokenizer.is_fast:
        raise ModelLoadError(
            f"encoder '{model_id}' needs a fast tokenizer (word alignment requires word_ids)"
        )
    model.eval()
    return tokenizer, model


def read_corpus(path: str) -> list[tuple[str, str]]:
    """(doc_id, text) pairs from a JSON Lines corpus file."""
    documents: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
            if not isinstance(raw, dict) or not isinstance(raw.get("id"), str) or not isinstance(raw.get("text"), str):
                raise CorpusError(f"line {line_no}: need string 'id' and 'text' fields")
            documents.append((raw["id"], raw["text"]))
    return documents


def sentence_tasks(documents: list[tuple[str, str]]) -> list[SentenceTask]:
    """One task per sentence that has word tokens; indices count all sentences."""
    tasks = []
    for doc_id, text in documents:
        for index, sentence in enumerate(split_sentences(text)):
            words = word_tokens(sentence)
            if words:
                tasks.append(SentenceTask(doc_id, index, tuple(words)))
    return tasks


def _alignment_from_word_ids(word_ids: list[int | None], n_words: int) -> AlignmentMap:
    ranges: dict[int, list[int]] = {}
    specials = set()
    for position, word_id in enumerate(word_ids):
        if word_id is None:
            specials.add(position)
        else:
            ranges.setdefault(word_id, []).append(position)
    if sorted(ranges) != list(range(n_words)):
        raise TokenizationError(
            f"tokenizer produced pieces for {sorted(ranges)[:5]}..., expected {n_words} words"
        )
    word_ranges = []
    for word_id in range(n_words):
        positions = ranges[word_id]
        if positions != list(range(positions[0], positions[-1] + 1)):
            raise TokenizationError(f"pieces of word {word_id} are not contiguous")
        word_ranges.append((positions[0], positions[-1] + 1))
    return AlignmentMap(
        word_ranges=tuple(word_ranges),
        n_positions=len(word_ids),
        special_positions=frozenset(specials),
    )


def _encode_batch(tokenizer, model, batch: list[SentenceTask]) -> list[dict]:
    import torch

    encoded = tokenizer(
        [list(task.words) for task in batch],
        is_split_into_words=True,
        padding=True,
        return_tensors="pt",
    )
    max_positions = getattr(model.config, "max_position_embeddings", None)
    if max_positions is not None and encoded["input_ids"].shape[1] > max_positions:
        longest = max(batch, key=lambda t: len(t.words))
        raise TokenizationError(
            f"sentence {longest.doc_id}:{longest.sentence_index} exceeds the "
            f"encoder's {max_positions}-position window"
        )
    with torch.no_grad():
        outputs = model(**encoded, output_attentions=True)

    # (layers, batch, heads, seq, seq) -> per-sentence slices below
    attentions = torch.stack(outputs.attentions).to(torch.float64).numpy()
    hidden = outputs.last_hidden_state.to(torch.float64).numpy()
    lengths = encoded["attention_mask"].sum(dim=1).tolist()

    records = []
    for b, task in enumerate(batch):
        n = int(lengths[b])
        word_ids = encoded.word_ids(b)[:n]
        alignment = _alignment_from_word_ids(word_ids, len(task.words))
        tensor = attentions[:, b, :, :n, :n]
        subword_means, subword_variances = received_attention(tensor)
        means, variances = align_to_words(subword_means, subword_variances, alignment)
        content = [p for p in range(n) if p not in alignment.special_positions]
        embedding = hidden[b, content].mean(axis=0)
        records.append(
            {
                "doc_id": task.doc_id,
                "sentence_index": task.sentence_index,
                "tokens": list(task.words),
                "attention_mean": [float(x) for x in means],
                "attention_variance": [float(x) for x in variances],
                "embedding": [float(x) for x in embedding],
            }
        )
    return records


def export_corpus(
    corpus_path: str,
    model_id: str,
    out_path: str,
    batch_size: int = 8,
) -> int:
    """Write one record per sentence; returns the record count."""
    tokenizer, model = load_encoder(model_id)
    if getattr(model.config, "hidden_size", None) != EMBEDDING_DIM:
        raise ModelLoadError(
            f"encoder hidden size must be {EMBEDDING_DIM}, "
            f"got {getattr(model.config, 'hidden_size', None)}"
        )
    tasks = sentence_tasks(read_corpus(corpus_path))
    written = 0
    with open(out_path, "w", encoding="utf-8") as handle:
        for start in range(0, len(tasks), batch_size):
            for record in _encode_batch(tokenizer, model, tasks[start : start + batch_size]):
                handle.write(json.dumps(record) + "\n")
                written += 1
    return written
