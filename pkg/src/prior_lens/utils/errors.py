"""Exception hierarchy shared by every prior_lens module.

Each error carries the CLI exit code it maps to: 2 usage, 3 data, 4 auth/network.
"""
from typing import Optional, Sequence


class PriorLensError(Exception):
    """Base class for all prior_lens errors."""

    exit_code: int = 1


class UsageError(PriorLensError):
    """Invalid combination of command-line flags."""

    exit_code = 2


class DomainError(PriorLensError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 3


class PreconditionError(PriorLensError, ValueError):
    """An operation was called with inputs it does not accept (e.g. empty)."""

    exit_code = 3


class UnsupportedFamilyError(PriorLensError):
    """The requested path has no closed form for this prior family."""

    exit_code = 3


class DegeneratePosteriorError(PriorLensError):
    """The posterior carries zero mass on the integration range."""

    exit_code = 3


class PredictionError(PriorLensError):
    """A prediction failed for one element of a curve."""

    exit_code = 3

    def __init__(self, t: float, cause: Exception):
        super().__init__(f"prediction failed at t={t}: {cause}")
        self.t = t
        self.cause = cause


class InsufficientDataError(PriorLensError):
    """Too few observations to fit the requested model."""

    exit_code = 3


class ConvergenceError(PriorLensError):
    """No optimizer start converged within the evaluation budget."""

    exit_code = 3

    def __init__(self, message: str, best_point: Sequence[float], best_mse: float):
        super().__init__(message)
        self.best_point = tuple(best_point)
        self.best_mse = best_mse


class ScenarioRangeError(PriorLensError, ValueError):
    """t lies outside the scenario grid."""

    exit_code = 2


class DataFormatError(PriorLensError):
    """A data file does not follow the expected layout."""

    exit_code = 3

    def __init__(self, message: str, column: Optional[str] = None):
        super().__init__(message)
        self.column = column


class EmptyDataError(PriorLensError):
    """A data file holds no usable observations."""

    exit_code = 3


class StoreError(PriorLensError):
    """Persisting an artifact failed; nothing was left at the target path."""

    exit_code = 3


class AuthenticationFailure(PriorLensError):
    """The endpoint rejected the credential, or none was configured."""

    exit_code = 4


class EmptyCompletionError(PriorLensError):
    """The endpoint answered without any completion choices."""

    exit_code = 3
