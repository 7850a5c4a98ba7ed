"""Exception hierarchy shared by all admmsvm modules."""


class AdmmSvmError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteError(AdmmSvmError):
    """NaN or Inf encountered in an input or in solver iterates."""


class NoConvergenceError(AdmmSvmError):
    """An iterative routine failed to reach its tolerance."""


class RankDeficientError(AdmmSvmError):
    """A matrix has no usable spectrum for the requested operation."""


class DimensionMismatchError(AdmmSvmError):
    """Operands have incompatible shapes."""


class IndexOutOfRangeError(AdmmSvmError):
    """A subset index falls outside the valid range."""


class DuplicateIndexError(AdmmSvmError):
    """A subset contains repeated indices."""


class InvalidCountError(AdmmSvmError):
    """A requested count violates its bounds (e.g. c > n or c = 0)."""


class NotConvergedError(AdmmSvmError):
    """A solver hit its iteration cap before reaching tolerance."""


class SingleClassError(AdmmSvmError):
    """Training data contains only one label value."""


class MalformedModelFileError(AdmmSvmError):
    """A model file is truncated, has a bad magic header, or bad shapes."""


class ParseError(AdmmSvmError):
    """A data file could not be parsed; carries line/column context."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class NotBinaryError(AdmmSvmError):
    """A dataset has more than two distinct label values."""


class MissingValueError(AdmmSvmError):
    """A dataset row has an empty or absent feature value."""


class NonAscendingIndexError(AdmmSvmError):
    """Sparse-text feature indices are not strictly ascending."""


class InsufficientClassSamplesError(AdmmSvmError):
    """A split cannot keep at least one sample of each class per side."""
