"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a mathematical precondition."""


class InsufficientInformationError(DomainError):
    """The input does not pin down the quantity being estimated."""


class DegenerateDirectionError(DomainError):
    """Prior or posterior mass on the requested side is numerically zero."""


class IntegrationError(RuntimeError):
    """Adaptive quadrature did not converge within its subdivision budget."""

    def __init__(self, message, bracket=None, error_estimate=None):
        super().__init__(message)
        self.bracket = bracket
        self.error_estimate = error_estimate
