"""Exception types raised across the package."""


class QvdpError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(QvdpError, ValueError):
    pass


class ShapeError(QvdpError, ValueError):
    pass


class DomainError(QvdpError, ValueError):
    """A closed-form expression is undefined for the requested parameters."""


class SolverError(QvdpError, RuntimeError):
    """Steady-state solve failed; ``residual`` holds the best residual reached."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class StepSizeError(QvdpError, ValueError):
    pass


class NormalizationError(QvdpError, ValueError):
    """Quadrature grid too narrow; ``leakage`` holds the missing probability mass."""

    def __init__(self, message, leakage=float("nan")):
        super().__init__(message)
        self.leakage = leakage


class ConfigError(QvdpError, ValueError):
    pass
