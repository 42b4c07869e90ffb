"""Exception and warning types raised by the package."""


class AgticError(ValueError):
    """Base class for all input and contract errors."""


class NonFiniteInput(AgticError):
    pass


class TooFewObservations(AgticError):
    pass


class InvalidQuantile(AgticError):
    pass


class DegenerateDistances(AgticError):
    pass


class InvalidThresholds(AgticError):
    pass


class GridTooSmall(AgticError):
    pass


class DimensionMismatch(AgticError):
    pass


class EmptyNulls(AgticError):
    pass


class DataError(AgticError):
    """Malformed or inconsistent input files."""


class DegenerateInputWarning(UserWarning):
    """A statistic hit a constant-input guard and returned 0."""


class IoFailure(OSError):
    """An output file could not be written."""
