"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class RangeError(DomainError):
    """An argument exceeds the admissible range (e.g. coupling above critical)."""


class ComputationError(RuntimeError):
    """A computation could not be completed to the requested tolerance."""


class QuadratureError(ComputationError):
    """A quadrature rule failed its internal consistency check."""
