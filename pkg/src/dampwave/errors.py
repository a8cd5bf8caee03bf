"""Exception hierarchy shared by all dampwave modules."""


class DampwaveError(Exception):
    """Base class for all package-specific errors."""


class DomainError(DampwaveError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedOrderError(DomainError):
    """Requested Bessel/Hankel order is outside the supported range."""


class IntegrationFailureError(DampwaveError, RuntimeError):
    """Adaptive ODE integration failed (step-size underflow)."""


class QuadratureError(DampwaveError, RuntimeError):
    """Radial quadrature did not converge to the requested tolerance."""


class DegenerateFitError(DampwaveError, ValueError):
    """Decay fit requested on a degenerate (all-zero or too short) track."""


class FitWindowError(DampwaveError, ValueError):
    """Fit window does not span a long enough range of Lambda(t)."""


class ResourceCapError(DampwaveError, RuntimeError):
    """Estimated resource usage exceeds the configured cap."""


class ValidationError(DampwaveError, ValueError):
    """Configuration validation failed; ``violations`` lists every problem."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration: " + "; ".join(self.violations))
