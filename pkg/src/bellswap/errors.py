"""Exception hierarchy shared by every module."""


class BellSwapError(Exception):
    """Base class for all package errors."""


class ValidationError(BellSwapError, ValueError):
    """A matrix fails one of the density-matrix invariants."""

    invariant = "density"

    def __init__(self, message, magnitude=None):
        super().__init__(message)
        self.magnitude = magnitude


class HermiticityError(ValidationError):
    invariant = "hermitian"


class TraceError(ValidationError):
    invariant = "unit_trace"


class PositivityError(ValidationError):
    invariant = "positive_semidefinite"


class DimensionError(BellSwapError, ValueError):
    """Wrong matrix shape for the requested operation."""


class DomainError(BellSwapError, ValueError):
    """A parameter lies outside the domain of a state family or channel."""


class ConvergenceError(BellSwapError, RuntimeError):
    """The Jacobi eigensolver hit its sweep limit."""


class ParseError(BellSwapError, ValueError):
    """Malformed state spec, grid spec or matrix file."""


class BracketError(BellSwapError, ValueError):
    """Bisection endpoints do not straddle the boundary."""
