"""Exception types shared across the library."""


class SchurDynError(Exception):
    """Base class for all library errors."""


class ValidationError(SchurDynError):
    """Malformed or inconsistent input (wrong shape, NaN entries, bad config)."""


class NearDegenerateError(SchurDynError):
    """Two eigenvalues closer than the degeneracy tolerance.

    The ordered-basis machinery is undefined at and near an exceptional
    point, so operations fail loudly instead of returning garbage.
    """

    def __init__(self, message, pair=None, location=None):
        super().__init__(message)
        self.pair = pair
        self.location = location


class ConvergenceError(SchurDynError):
    """An iterative solve exhausted its sweep budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GridError(SchurDynError):
    """Trajectory sampling too coarse (branch ambiguity or vanishing overlap)."""


class RatioUndefinedError(SchurDynError):
    """State ratio requested where the first component vanishes."""
