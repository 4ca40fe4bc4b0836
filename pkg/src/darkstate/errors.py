"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(ValueError):
    """A requested control cannot be realised (e.g. infinite drive)."""


class TruncationError(ValueError):
    """A pulse does not fit on its time grid."""


class GridMismatchError(ValueError):
    """Two sampled objects live on different time grids."""


class ConvergenceError(RuntimeError):
    """Step-halving indicates the integration is not resolved."""


class SingularityError(ValueError):
    """A logarithmic derivative hits a zero of its argument."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
