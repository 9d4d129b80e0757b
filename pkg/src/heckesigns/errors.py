"""Exception hierarchy shared by every module in the package."""


class HeckeError(Exception):
    """Base class for all package errors."""


class UsageError(HeckeError, ValueError):
    """Caller violated a precondition (bad argument, out-of-range index)."""


class UnsupportedWeightError(UsageError):
    """No one-dimensional level-1 cusp space exists for the requested weight."""


class InvalidLevelError(HeckeError):
    """A curve or table does not behave like a squarefree-level newform."""


class LoadError(HeckeError):
    """A coefficient file could not be parsed or failed validation.

    ``index`` is the first offending coefficient index, when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SearchExhaustedError(HeckeError):
    """A search ran off the end of the stored coefficient table."""


class InvariantViolation(HeckeError):
    """A structural invariant that should hold by construction was broken."""
