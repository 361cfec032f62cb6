"""Exception types raised by the integration and analysis routines."""


class SymprecError(Exception):
    """Base class for all package errors."""


class DomainError(SymprecError, ValueError):
    """A function was evaluated outside its domain (e.g. at the origin)."""


class SingularityError(SymprecError):
    """The trajectory came too close to the force singularity.

    ``step`` is the index of the integration step during which the failure
    occurred, or ``None`` if it happened outside a stepping loop.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class UnboundOrbitError(SymprecError, ValueError):
    """Orbital elements were requested for a state with E >= 0."""


class DegenerateVectorError(SymprecError, ValueError):
    """An angle was requested between vectors of (numerically) zero length."""


class UnknownAlgorithmError(SymprecError, KeyError):
    """An algorithm identifier is not in the registry."""


class OrderMismatchError(SymprecError, ValueError):
    """An operation requires a scheme of a different order."""


class ConvergenceError(SymprecError):
    """A numerical estimate failed its own stationarity check."""
