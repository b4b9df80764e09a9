"""
Exception hierarchy for the dpp-impute pipeline.

Every error raised on purpose by the library derives from DppImputeError so
the CLI can report it and exit nonzero; anything else is a bug and keeps its
traceback.
"""

from typing import Optional


class DppImputeError(Exception):
    """Base class for all expected pipeline failures."""


class InvalidInputError(DppImputeError, ValueError):
    """Input violates a documented precondition (shape, range, symmetry, ...)."""


class RankDeficiencyError(DppImputeError):
    """A matrix is numerically rank deficient where full column rank is required."""

    def __init__(self, message: str, column: Optional[int] = None):
        super().__init__(message)
        self.column = column


class DegenerateKernelError(DppImputeError):
    """A DPP kernel has fewer than k nonzero eigenvalues."""

    def __init__(self, message: str, batch: Optional[int] = None):
        super().__init__(message)
        self.batch = batch


class CapacityError(DppImputeError):
    """Problem size exceeds an enumeration or simulation bound."""


class UndefinedMetricError(DppImputeError):
    """A metric has no defined value for the given input (e.g. single-class AUC)."""


class DegenerateModelError(DppImputeError):
    """A model cannot be fit on the given training data."""


class ConvergenceError(DppImputeError):
    """An iterative numerical routine did not reach its tolerance."""


class ParseError(DppImputeError):
    """A data file cell could not be parsed."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        super().__init__(message)
        self.row = row
        self.column = column
