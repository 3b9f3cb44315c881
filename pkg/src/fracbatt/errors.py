"""Exception types shared across the package."""


class FracbattError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FracbattError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(FracbattError, ValueError):
    """A lookup falls outside tabulated data (no extrapolation is performed)."""


class NonFiniteError(FracbattError, ArithmeticError):
    """A computation produced or would produce a non-finite intermediate."""


class EvaluationError(FracbattError, ArithmeticError):
    """The requested accuracy cannot be delivered on this argument."""


class DegenerateDataError(FracbattError, ValueError):
    """Input data carries no usable signal (e.g. a flat relaxation curve)."""
