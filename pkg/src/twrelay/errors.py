"""Exception types shared across the package."""


class TwrelayError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(TwrelayError):
    """Matrix is not Hermitian within tolerance."""


class NotPositiveDefinite(TwrelayError):
    """Matrix is not positive definite."""


class DimensionMismatch(TwrelayError):
    """Operands have inconsistent shapes for the requested operation."""


class DegenerateChannel(TwrelayError):
    """Channel realization carries no usable signal path."""


class NoPositiveEigenvalue(TwrelayError):
    """Waterfilling needs at least one strictly positive eigenvalue."""


class InvalidMultiplexingGain(TwrelayError):
    """Multiplexing gain outside [0, min(m1, m2)]."""


class InsufficientEvents(TwrelayError):
    """Too few outage events to fit an exponent.

    When raised by an outage estimator, the partial estimates are attached
    as the ``curve`` attribute so callers can still report raw counts.
    """

    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = curve


class Infeasible(TwrelayError):
    """SINR targets are unreachable at any relay power."""


class DidNotConverge(TwrelayError):
    """Iterative solver failed to reach its tolerance."""


class ConfigError(TwrelayError):
    """Experiment configuration is malformed or inconsistent."""


class TableValidationError(TwrelayError):
    """A result table violates an ordering or sanity invariant."""
