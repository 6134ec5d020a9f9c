"""Exception types raised across the package."""


class FracwaveError(Exception):
    """Base class for all package errors."""


class GridMismatch(FracwaveError, ValueError):
    pass


class PositivityViolation(FracwaveError, ValueError):
    """A coefficient violates its sign constraint (g > 0, m >= 0, b >= 0)."""


class UnresolvableKernel(FracwaveError, ValueError):
    """Mollifier width is below the resolvable limit of 4 grid spacings."""


class StabilityBreach(FracwaveError, RuntimeError):
    """Time integration blew up (non-finite state or runaway norm)."""


class ForcingPresent(FracwaveError, ValueError):
    pass


class ScopeViolation(FracwaveError, ValueError):
    """Experiment requested outside the g == 1 scope it is defined for."""


class InconclusiveFit(FracwaveError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RegimeViolation(FracwaveError, ValueError):
    """An inequality probe was requested with d <= 2s."""


class MisalignedTauGrid(FracwaveError, ValueError):
    pass


class ConfigError(FracwaveError, ValueError):
    """Config validation failure; ``errors`` holds path-qualified messages."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
