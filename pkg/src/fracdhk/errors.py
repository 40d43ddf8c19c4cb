"""Exception hierarchy shared by all modules."""


class FracDHKError(Exception):
    """Base class for library errors."""


class DomainError(FracDHKError, ValueError):
    """Argument outside the mathematical domain of a function."""


class OrderTooHigh(FracDHKError):
    """Operation requires a lower distributional order."""


class DerivativeUnavailable(FracDHKError):
    """A smooth function cannot supply the requested derivative order."""


class QuadratureNonConvergence(FracDHKError):
    """Adaptive quadrature exhausted its node budget."""


class NotInCm(FracDHKError):
    """Smoothness certificate failed for an inversion or decomposition."""


NotInCn = NotInCm


class NotSolvable(FracDHKError):
    """Abel equation has no solution in the space of order-one distributions."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParameterOutOfRange(FracDHKError, ValueError):
    """Catalog constructor parameters violate their stated constraints."""
