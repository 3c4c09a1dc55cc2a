"""Exception types raised by geophase."""

from __future__ import annotations


class GeophaseError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(GeophaseError, ValueError):
    pass


class InvalidArgumentError(GeophaseError, ValueError):
    pass


class DomainError(GeophaseError, ValueError):
    pass


class PreconditionError(GeophaseError, ValueError):
    pass


class AccuracyError(GeophaseError, ArithmeticError):
    """Raised when a numerical routine misses its requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


class TruncationError(GeophaseError, ArithmeticError):
    """A Fock-space state carries too much weight near the cutoff."""

    def __init__(self, message: str, tail_mass: float):
        super().__init__(f"{message} (tail mass {tail_mass:.3e})")
        self.tail_mass = tail_mass


class ResolutionError(GeophaseError, ArithmeticError):
    """Adjacent loop states overlap too weakly for a reliable phase."""


class GridError(GeophaseError, ValueError):
    pass
