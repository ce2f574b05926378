"""Custom exceptions for tunnelgap."""

from __future__ import annotations

from typing import Tuple


class ConfigError(Exception):
    """Raised when configuration loading or validation fails."""

    exit_code = 2


class UserInputError(Exception):
    """Raised when command-line input is missing or invalid."""

    exit_code = 2


class SolverError(Exception):
    """Raised when a numerical solver cannot produce a result."""

    exit_code = 3


class DomainError(SolverError):
    """Raised when a special function is evaluated outside its domain."""


class ConvergenceError(SolverError):
    """Raised when a series or search stops before its tolerance is met."""


class NoRootError(SolverError):
    """Raised when a root scan finds no sign change."""


class PrecisionCeilingError(SolverError):
    """Raised when adaptive precision would exceed the configured cap."""


class NegativeGapError(SolverError):
    """Raised when a truncated expansion produces a non-positive gap."""


class BracketError(SolverError):
    """Raised when a threshold search bracket does not contain the target."""


class NonMonotoneError(SolverError):
    """Raised when a quantity expected to be monotone is not."""


class InputDataError(Exception):
    """Raised when a data series is malformed or too short for an operation."""

    exit_code = 4


class DegenerateError(InputDataError):
    """Raised when data has no spread (all abscissae equal, too few eigenvalues)."""


class EmptyBinError(InputDataError):
    """Raised when one or more fit bins hold fewer than two points."""

    def __init__(self, bins: list[tuple[float, float]]) -> None:
        self.bins = list(bins)
        listed = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self.bins)
        super().__init__(f"Bins with fewer than 2 points: {listed}")


class NonUniformGridError(InputDataError):
    """Raised when a series is not uniformly spaced in ln n."""


class RegimeError(Exception):
    """Raised when parameters fall outside the supported physical regime."""

    exit_code = 5


class BoundaryError(RegimeError):
    """Raised when alpha sits exactly on a scaling-region boundary."""


class FlatMinimumWarning(UserWarning):
    """Emitted when the coarse s-grid minimum is not well separated."""


_ERROR_PREFIXES: Tuple[Tuple[type[BaseException], str], ...] = (
    (ConfigError, "Config error"),
    (UserInputError, "Input error"),
    (SolverError, "Solver error"),
    (InputDataError, "Data error"),
    (RegimeError, "Regime error"),
)


def format_error(exc: BaseException) -> str:
    """Return a one-line error message with a consistent prefix and the class name."""
    message = " ".join(str(exc).split()) or exc.__class__.__name__
    for exc_type, prefix in _ERROR_PREFIXES:
        if isinstance(exc, exc_type):
            return f"{prefix}: {exc.__class__.__name__}: {message}"
    return f"Unexpected error: {message}"


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code of its family (1 if unknown)."""
    return int(getattr(exc, "exit_code", 1))


__all__ = [
    "BoundaryError",
    "BracketError",
    "ConfigError",
    "ConvergenceError",
    "DegenerateError",
    "DomainError",
    "EmptyBinError",
    "FlatMinimumWarning",
    "InputDataError",
    "NegativeGapError",
    "NoRootError",
    "NonMonotoneError",
    "NonUniformGridError",
    "PrecisionCeilingError",
    "RegimeError",
    "SolverError",
    "UserInputError",
    "exit_code_for",
    "format_error",
]
