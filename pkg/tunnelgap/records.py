"""Gap records shared by the discrete, continuous and asymptotic solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

Method = Literal["discrete", "continuous", "asymptotic1", "asymptotic2"]
ALLOWED_METHODS = ("discrete", "continuous", "asymptotic1", "asymptotic2")

# Smallest log-gap that still converts to a normal double.
MIN_LOG_DOUBLE = math.log(2.2250738585072014e-308)


@dataclass(frozen=True)
class GapRecord:
    """One minimum-gap result for (n, alpha, method) with its provenance.

    ``gap`` is absent only when the value underflows double range; ``log_gap``
    is then authoritative and consumers should prefer it whenever it is set.
    """

    n: float
    alpha: float
    method: Method
    gap: float | None
    log_gap: float | None = None
    s_star: float | None = None
    digits_used: int | None = None

    def __post_init__(self) -> None:
        if self.method not in ALLOWED_METHODS:
            raise ValueError(f"Unknown method: {self.method}")
        if self.gap is None and self.log_gap is None:
            raise ValueError("GapRecord needs gap or log_gap.")
        if self.gap is not None and not self.gap > 0:
            raise ValueError(f"Gap must be positive, got {self.gap}.")
        if (self.s_star is not None) != (self.method == "discrete"):
            raise ValueError("s_star is recorded for the discrete method only.")
        if self.digits_used is not None and self.method != "continuous":
            raise ValueError("digits_used is recorded for the continuous method only.")

    @property
    def f(self) -> float:
        """Natural log of the gap, from ``log_gap`` when available."""
        if self.log_gap is not None:
            return self.log_gap
        assert self.gap is not None
        return math.log(self.gap)


def gap_from_log(log_gap: float) -> float | None:
    """Return exp(log_gap) as a float, or None when it would underflow."""
    if log_gap < MIN_LOG_DOUBLE:
        return None
    return math.exp(log_gap)


__all__ = ["ALLOWED_METHODS", "GapRecord", "Method", "gap_from_log"]
