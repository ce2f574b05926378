"""Closed-form large-n gap expressions and the quantities derived from them."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

from mpmath import mp, mpf

from tunnelgap.continuous import DEFAULT_C, DEFAULT_OMEGA
from tunnelgap.errors import BoundaryError, NegativeGapError, RegimeError
from tunnelgap.records import GapRecord, gap_from_log
from tunnelgap.specfun import GUARD_DIGITS, PrecisionPolicy, digamma

Region = Literal["constant", "polynomial", "exponential"]

POLYNOMIAL_LOW = 0.25
EXPONENTIAL_LOW = 1.0 / 3.0

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AsymptoticConstants:
    """Constants of the second-order expansion for a given omega, c and alpha."""

    kappa: float
    second_order_coeff: float
    region: Region


def classify_region(alpha: float) -> Region:
    """Scaling region of the minimum gap for barrier power alpha."""
    if not 0 < alpha < 0.5:
        raise RegimeError(f"alpha must lie in (0, 1/2), got {alpha}.")
    if math.isclose(alpha, POLYNOMIAL_LOW, rel_tol=0, abs_tol=1e-15) or math.isclose(
        alpha, EXPONENTIAL_LOW, rel_tol=0, abs_tol=1e-15
    ):
        raise BoundaryError(f"alpha={alpha} lies on a region boundary (1/4 or 1/3).")
    if alpha < POLYNOMIAL_LOW:
        return "constant"
    if alpha < EXPONENTIAL_LOW:
        return "polynomial"
    return "exponential"


def _require_polynomial(alpha: float) -> None:
    region = classify_region(alpha)
    if region != "polynomial":
        raise RegimeError(f"alpha={alpha} is in the {region} region; need 1/4 < alpha < 1/3.")


def _log_digamma_sum(prec: PrecisionPolicy) -> mpf:
    # ln 2 + psi_0(-1/2)
    with mp.workdps(prec.digits + GUARD_DIGITS):
        return mp.ln2 + digamma(mpf(-1) / 2, prec)


def kappa(omega: float = DEFAULT_OMEGA, prec: PrecisionPolicy | None = None) -> float:
    """Relative size of the second-order correction: (2/sqrt(pi omega))(ln 2 + psi_0(-1/2))."""
    if omega <= 0:
        raise RegimeError("omega must be positive.")
    prec = prec or PrecisionPolicy(digits=30)
    with mp.workdps(prec.digits + GUARD_DIGITS):
        return float(2 / mp.sqrt(mp.pi * omega) * _log_digamma_sum(prec))


def asymptotic_constants(
    alpha: float,
    omega: float = DEFAULT_OMEGA,
    c: float = DEFAULT_C,
    prec: PrecisionPolicy | None = None,
) -> AsymptoticConstants:
    """kappa, the second-order coefficient (16/(c pi))(ln 2 + psi_0(-1/2)) and the region."""
    prec = prec or PrecisionPolicy(digits=30)
    region = classify_region(alpha)
    with mp.workdps(prec.digits + GUARD_DIGITS):
        coeff = float(16 / (mpf(c) * mp.pi) * _log_digamma_sum(prec))
    return AsymptoticConstants(kappa=kappa(omega, prec), second_order_coeff=coeff, region=region)


def _leading_log_gap(n: float, alpha: float, omega: float, c: float, region: Region) -> float:
    log_eps = math.log(2.0) - math.log(n)
    if region == "polynomial":
        prefactor = 8.0 * math.sqrt(omega) / (c * math.sqrt(math.pi))
        return math.log(prefactor) + (2.0 * alpha - 0.5) * log_eps
    prefactor = 16.0 * omega / (c * math.sqrt(math.pi))
    decay = math.sqrt(omega) * math.exp((0.5 - 1.5 * alpha) * log_eps)
    return math.log(prefactor) + 0.5 * alpha * log_eps - decay


def gap_first_order(
    n: float, alpha: float, omega: float = DEFAULT_OMEGA, c: float = DEFAULT_C
) -> GapRecord:
    """Leading-order asymptotic gap, power law or stretched exponential by region.

    The value is formed in log space; ``gap`` is left empty when it underflows.
    """
    region = classify_region(alpha)
    if region == "constant":
        raise RegimeError(f"No asymptotic gap formula for alpha={alpha} (constant region).")
    log_gap = _leading_log_gap(float(n), alpha, omega, c, region)
    return GapRecord(
        n=n, alpha=alpha, method="asymptotic1", gap=gap_from_log(log_gap), log_gap=log_gap
    )


def gap_second_order(
    n: float,
    alpha: float,
    omega: float = DEFAULT_OMEGA,
    c: float = DEFAULT_C,
    prec: PrecisionPolicy | None = None,
) -> GapRecord:
    """Leading term minus the (16/(c pi))(ln 2 + psi_0(-1/2)) eps^(4 alpha - 1) correction."""
    _require_polynomial(alpha)
    prec = prec or PrecisionPolicy(digits=30)
    with mp.workdps(prec.digits + GUARD_DIGITS):
        eps = 2 / mpf(n)
        first = 8 * mp.sqrt(omega) / (mpf(c) * mp.sqrt(mp.pi)) * eps ** (2 * mpf(alpha) - mpf(1) / 2)
        correction = 16 / (mpf(c) * mp.pi) * _log_digamma_sum(prec) * eps ** (4 * mpf(alpha) - 1)
        gap = first - correction
        if gap <= 0:
            raise NegativeGapError(
                f"Second-order gap is non-positive at n={n:g}, alpha={alpha}: "
                "n is below the expansion's validity."
            )
        log_gap = float(mp.log(gap))
    return GapRecord(
        n=n, alpha=alpha, method="asymptotic2", gap=gap_from_log(log_gap), log_gap=log_gap
    )


def n_threshold_estimate(
    v: float,
    alpha: float,
    omega: float = DEFAULT_OMEGA,
    prec: PrecisionPolicy | None = None,
) -> float:
    """n at which the second-order/first-order ratio reaches v: 2 (kappa/(1-v))^(1/(2 alpha - 1/2))."""
    _require_polynomial(alpha)
    if not 0 < v < 1:
        raise RegimeError(f"Threshold v must lie in (0, 1), got {v}.")
    base = kappa(omega, prec) / (1.0 - v)
    return 2.0 * base ** (1.0 / (2.0 * alpha - 0.5))


def target_ratio(alpha: float) -> float:
    """Large-n limit of R = f''/f': 0 for power laws, (3 alpha - 1)/2 in the exponential region."""
    region = classify_region(alpha)
    return (3.0 * alpha - 1.0) / 2.0 if region == "exponential" else 0.0


__all__ = [
    "AsymptoticConstants",
    "Region",
    "asymptotic_constants",
    "classify_region",
    "gap_first_order",
    "gap_second_order",
    "kappa",
    "n_threshold_estimate",
    "target_ratio",
]
