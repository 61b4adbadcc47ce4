"""Exception types raised by pblab."""


class PblabError(Exception):
    """Base class for all pblab errors."""


class DimensionError(PblabError, ValueError):
    """Invalid truncation or index range."""


class NumericalError(PblabError, ArithmeticError):
    """A linear-algebra routine failed."""

    def __init__(self, message, M=None):
        super().__init__(message if M is None else f"{message} (M={M})")
        self.M = M


class RangeError(PblabError, OverflowError):
    """Evaluation would exceed the double-precision range."""


class TruncationError(PblabError):
    """The truncated space is too small to certify a requested vector."""

    def __init__(self, index, tail_bound, tolerance):
        super().__init__(
            f"tail bound {tail_bound:.3e} at index {index} exceeds tolerance {tolerance:.3e}; "
            "increase M"
        )
        self.index = index
        self.tail_bound = tail_bound
        self.tolerance = tolerance


class InvariantViolation(PblabError, AssertionError):
    """A property that must hold numerically did not."""


class ConstructionError(PblabError):
    """Two routes to the same operator disagree beyond tolerance."""


class ConfigError(PblabError, ValueError):
    """Invalid experiment configuration."""
