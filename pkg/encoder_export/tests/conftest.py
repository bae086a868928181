"""Shared fixture: a tiny local encoder (768-dim, 2 layers, 2 heads).

Weights are random but seeded; what the tests exercise is the extraction
machinery and the record contract, which do not depend on pretrained weights.
"""

import json

import pytest
import torch
from tokenizers import Tokenizer, normalizers, pre_tokenizers, processors
from tokenizers.models import WordPiece
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "council", "review", "##ed", "##s", "annual", "hous", "##ing",
    "budget", "report", "members", "debate", "##d", "transit", "fund",
    "committee", "approve", "zone", "amendment", "public", "comments",
    "ran", "long", "staff", "present", "safety", "vote", "passed", "it",
    "again", "same", "sentence", "here", "water", "energy", "audit",
]

CORPUS_LINES = [
    {"id": "doc-a", "text": "The council reviewed the annual housing budget. Members debated transit funding."},
    {"id": "doc-b", "text": "The committee approved it. Safety staff presented the report; the vote passed."},
    {"id": "doc-c", "text": "Same sentence here again. Same sentence here again. Same sentence here again."},
    {"id": "doc-d", "text": "Water and energy audits happen. ?! Public comments ran long."},
    {"id": "doc-e", "text": "Unknownword fnords zigzag. The budget report passed."},
]


def build_wordpiece_tokenizer(vocab: list[str]) -> PreTrainedTokenizerFast:
    core = Tokenizer(WordPiece({t: i for i, t in enumerate(vocab)}, unk_token="[UNK]"))
    core.normalizer = normalizers.BertNormalizer(lowercase=True)
    core.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    core.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab.index("[CLS]")), ("[SEP]", vocab.index("[SEP]"))],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


@pytest.fixture(scope="session")
def tiny_encoder_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("tiny-encoder")
    tokenizer = build_wordpiece_tokenizer(VOCAB)

    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=768,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=128,
        max_position_embeddings=64,
    )
    torch.manual_seed(20240817)
    model = BertModel(config)
    model.eval()

    model_dir = root / "model"
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return str(model_dir)


@pytest.fixture(scope="session")
def corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "corpus.jsonl"
    path.write_text(
        "\n".join(json.dumps(line) for line in CORPUS_LINES) + "\n", encoding="utf-8"
    )
    return str(path)
