"""Exception types raised across the package."""


class DipoleFrontError(Exception):
    """Base class for all package errors."""


class DomainError(DipoleFrontError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RegimeError(DipoleFrontError, ValueError):
    """Argument outside the regime where an approximation or algorithm is valid."""


class DivergenceError(DipoleFrontError, ArithmeticError):
    """A spectral integral failed to converge (IR/UV divergence or budget exhausted)."""


class InvalidCurrentError(DipoleFrontError, ValueError):
    """Current violates transversality (k . J(k) != 0)."""


class InconsistencyError(DipoleFrontError, ValueError):
    """Inputs are mutually inconsistent, e.g. zero variance with nonzero higher cumulants."""
