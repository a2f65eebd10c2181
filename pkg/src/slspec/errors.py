"""Exception types raised by the solver.

Every solver failure derives from :class:`SpectralError` so callers (and the
CLI) can separate numerical failures from malformed input.
"""


class SpectralError(Exception):
    """Base class for solver failures."""


class NotAnEigenvalue(SpectralError):
    pass


class BracketFailure(SpectralError):
    pass


class MultipleRootSuspect(SpectralError):
    pass


class SignError(SpectralError):
    pass


class ContourThroughRoot(SpectralError):
    pass


class PositivityError(SpectralError):
    pass


class InterlacingViolation(SpectralError):
    pass


class NoConvergence(SpectralError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class NoBracket(SpectralError):
    pass


class DomainError(SpectralError):
    pass


class PoleError(SpectralError):
    pass


class PotentialFormatError(ValueError):
    """Malformed potential file or sample array."""
