"""Exception types raised by the Fock-space engine."""


class FockError(Exception):
    """Base class for all errors raised by :mod:`fockent`."""


class NormalizationError(FockError, ValueError):
    """A state violated the normalization precondition of an operation."""


class TruncationError(FockError, RuntimeError):
    """Probability weight lost to the photon-number cutoff exceeded its budget."""


class DivergentSeriesError(FockError, ValueError):
    """The requested Fock-series does not converge (k == l with |eta| > 1)."""


class DegenerateStateError(FockError, ValueError):
    """A superposition collapsed to (numerically) zero norm."""
