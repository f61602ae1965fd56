"""Exception types raised across the package."""


class GowersError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(GowersError, ValueError):
    """A scalar parameter is outside its admissible range."""


class DimensionError(GowersError, ValueError):
    """Objects living on different groups or cube dimensions were combined."""


class InvalidInputError(GowersError, ValueError):
    """Malformed structured input (missing vertices, bad JSON, ...)."""


class ResourceError(GowersError, RuntimeError):
    """The requested computation exceeds a configured size guard."""


class NumericalConsistencyError(GowersError, ArithmeticError):
    """A quantity that is mathematically nonnegative came out clearly negative."""


class RegularityFailure(GowersError, RuntimeError):
    """The energy-increment loop hit its cell cap before becoming regular.

    The ``history`` attribute carries the per-round record collected so far.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])
