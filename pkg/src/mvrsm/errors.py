"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "MvrsmError",
    "EmptySpaceError",
    "InvertedBoundsError",
    "NonIntegerBoundError",
    "NoIntegerVariablesError",
    "DimensionMismatchError",
    "EmptyDirectionSetError",
    "TooLargeError",
    "NonPositiveLambdaError",
    "NonFiniteError",
    "NonIntegralInputError",
    "DimensionTooSmallError",
    "UnknownBenchmarkError",
    "ProtocolViolationError",
    "ObjectiveFailureError",
    "ConfigError",
    "LengthMismatchError",
]


class MvrsmError(Exception):
    """Base class for every error raised by this package."""


class EmptySpaceError(MvrsmError, ValueError):
    """A search space must declare at least one variable."""


class InvertedBoundsError(MvrsmError, ValueError):
    """lower > upper for some variable."""

    def __init__(self, index: int, lower: float, upper: float):
        self.index = index
        super().__init__(f"variable {index}: lower {lower!r} > upper {upper!r}")


class NonIntegerBoundError(MvrsmError, ValueError):
    """An integer variable was declared with a non-integral bound."""

    def __init__(self, index: int, value: float):
        self.index = index
        super().__init__(f"variable {index}: integer bound {value!r} is not integral")


class NoIntegerVariablesError(MvrsmError, ValueError):
    """The method requires at least one integer variable."""


class DimensionMismatchError(MvrsmError, ValueError):
    """A point or vector does not match the expected dimension."""


class EmptyDirectionSetError(MvrsmError, ValueError):
    """Mixed units need a non-empty direction set when continuous variables exist."""


class TooLargeError(MvrsmError, ValueError):
    """Exhaustive vertex enumeration would exceed the combinatorial budget."""


class NonPositiveLambdaError(MvrsmError, ValueError):
    """The recursive least squares regulariser must be strictly positive."""


class NonFiniteError(MvrsmError, ValueError):
    """A NaN or infinity reached a numerical routine."""


class NonIntegralInputError(MvrsmError, ValueError):
    """An integer-block vector holds non-integral values."""


class DimensionTooSmallError(MvrsmError, ValueError):
    """The objective needs more coordinates than were supplied."""


class UnknownBenchmarkError(MvrsmError, KeyError):
    """No benchmark is registered under this name."""


class ProtocolViolationError(MvrsmError, RuntimeError):
    """ask/tell were called out of turn."""


class ObjectiveFailureError(MvrsmError, RuntimeError):
    """The objective raised or returned a non-finite value; carries the partial trace."""

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)


class ConfigError(MvrsmError, ValueError):
    """An experiment config file is malformed or inconsistent."""


class LengthMismatchError(MvrsmError, ValueError):
    """Traces passed to the summarizer are empty or have unequal lengths."""
