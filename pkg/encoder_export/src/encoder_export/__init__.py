"""encoder_export: word-aligned attention statistics from an encoder model."""

from .attention import AlignmentMap, align_to_words, received_attention
from .errors import (
    CorpusError,
    CoverageError,
    ExportError,
    ModelLoadError,
    TokenizationError,
)
from .export import export_corpus, load_encoder, read_corpus, sentence_tasks
from .segmentation import split_sentences, word_tokens

__version__ = "0.1.0"
