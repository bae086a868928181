"""Error types for the export tool."""


class ExportError(Exception):
    """Base class for export failures."""


class ModelLoadError(ExportError):
    """The encoder model or tokenizer could not be loaded."""


class TokenizationError(ExportError):
    """A sentence could not be tokenized within the model's limits."""


class CoverageError(ExportError):
    """Alignment ranges do not cover every non-special subword position."""


class CorpusError(ExportError):
    """The corpus file is malformed."""
