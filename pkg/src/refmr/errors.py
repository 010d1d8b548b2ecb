"""Exception hierarchy shared by all modules."""


class RefmrError(Exception):
    """Base class for every error raised by this package."""


class AnnotationError(RefmrError, ValueError):
    """Input text could not be read into a valid structure."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ParseError(AnnotationError):
    """Malformed record syntax."""


class ValidationError(AnnotationError):
    """Well-formed records that violate a structural invariant."""


class CoverageError(RefmrError, ValueError):
    """A key partition does not cover the document's referring expressions."""


class ContractViolation(RefmrError, RuntimeError):
    """An operation was called outside its precondition."""


class NotApplicableError(RefmrError, ValueError):
    """The lexicon has no usable entry for the requested operation."""


class ConfigError(RefmrError, ValueError):
    """Invalid resolver, salience or tuning configuration."""


class ReplayError(RefmrError, RuntimeError):
    """A trace does not replay to the recorded state."""
