"""Exception types shared across the package.

Every error raised by the library derives from :class:`PisError` so callers
can catch data-level failures in one place (the CLI maps them to exit code 2).
"""


class PisError(Exception):
    """Base class for all library errors."""


class EmptySentence(PisError):
    """An operation required at least one word token."""


class DomainError(PisError, ValueError):
    """A numeric argument is outside its documented domain."""


class SubsequenceViolation(PisError):
    """Token list is not an index-increasing subsequence of the original."""


class ParseError(PisError):
    """A file could not be decoded.  Carries the offending line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class SchemaError(PisError):
    """A record violated the documented schema.  Carries the field name."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message)


class NormalizationError(PisError):
    """Attention weights do not sum to 1 within tolerance."""


class DuplicateKey(PisError):
    """Two records share the same (doc_id, sentence_index) key."""


class AlignmentError(PisError):
    """Encoder record tokens do not line up with the sentence's word tokens."""

    def __init__(self, message: str, token_index: int):
        self.token_index = token_index
        super().__init__(message)


class DimensionError(PisError):
    """A vector did not have the expected dimension."""


class ZeroVector(PisError):
    """Cosine similarity is undefined for zero-norm vectors."""


class RangeError(PisError, ValueError):
    """An index or counter is outside its valid range."""


class EmptyBuffer(PisError):
    """Sampling was requested from an empty replay buffer."""


class VersionMismatch(PisError):
    """Model file carries an unsupported format version."""


class ShapeMismatch(PisError):
    """Model file widths are incompatible with the policy contract."""


class MissingPolicy(PisError):
    """Policy-mode compression was requested without a trained network."""


class MissingField(PisError):
    """A corpus line lacks a required field."""

    def __init__(self, message: str, field: str | None = None, line_no: int | None = None):
        self.field = field
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class NoReferences(PisError):
    """Evaluation needs at least one document with a reference or answer."""


class EmptyLexicon(PisError):
    """Noise injection needs a non-empty lexicon."""
