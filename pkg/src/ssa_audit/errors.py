"""Exception hierarchy shared across the package."""


class SsaAuditError(Exception):
    """Base class for all package errors."""


class EmptyInput(SsaAuditError):
    """Raised when a text to tokenize is empty or whitespace-only."""


class AlignmentError(SsaAuditError):
    """Raised when two sentences cannot be aligned position-wise."""


class ParseError(SsaAuditError):
    """Raised on a malformed line in a pair file. Carries the line number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class NoSense(SsaAuditError):
    """Raised when a word has no entry in the sense inventory."""


class DegenerateVector(SsaAuditError):
    """Raised when a zero vector reaches a cosine computation."""


class OovWord(SsaAuditError):
    """Raised when a word is missing from a vector store's vocabulary."""


class BandOutOfRange(SsaAuditError):
    """Raised when a frequency band exceeds the vocabulary size."""


class AdapterError(SsaAuditError):
    """Raised when an external adapter (MLM, encoder, checker, victim) fails."""


class EmptyPrediction(SsaAuditError):
    """Raised when an MLM adapter answers successfully but with no candidates."""


class NotASubstitution(SsaAuditError):
    """Raised when classifying a replacement identical to the original word."""


class InsufficientData(SsaAuditError):
    """Raised when a metric is requested on an empty score list."""


class EmptySeries(SsaAuditError):
    """Raised when a swap series has no eligible positions."""


class UnknownPreset(SsaAuditError):
    """Raised for an unrecognized attack preset name."""
