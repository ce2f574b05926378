"""Configurable-precision special functions: Kummer M, parabolic cylinder D_nu, digamma.

Every function evaluates inside its own ``mpmath.mp.workdps`` block, so the
result does not depend on the caller's ambient precision. Values are returned
as ``mpmath.mpf``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from mpmath import mp, mpf

from tunnelgap.errors import ConfigError, ConvergenceError, DomainError

Real = Union[int, float, mpf]

MIN_DIGITS = 16
GUARD_DIGITS = 10
DEFAULT_MAX_TERMS = 10_000
# Series stop after this many consecutive sub-tolerance terms.
QUIET_TERMS = 3


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision and series-truncation controls."""

    digits: int
    max_terms: int = DEFAULT_MAX_TERMS
    tail_tol: mpf | None = None

    def __post_init__(self) -> None:
        if isinstance(self.digits, bool) or not isinstance(self.digits, int):
            raise ConfigError("Precision digits must be an integer.")
        if self.digits < MIN_DIGITS:
            raise ConfigError(f"Precision digits must be >= {MIN_DIGITS}.")
        if self.max_terms < 1:
            raise ConfigError("Precision max_terms must be >= 1.")
        if self.tail_tol is None:
            object.__setattr__(self, "tail_tol", mpf(10) ** (-(self.digits + 3)))
        tol = mpf(self.tail_tol)
        if not (0 < tol < mpf(10) ** (-mpf(self.digits) / 2)):
            raise ConfigError("Precision tail_tol must lie in (0, 10^(-digits/2)).")
        object.__setattr__(self, "tail_tol", tol)

    def with_digits(self, digits: int) -> PrecisionPolicy:
        """Return the same policy at a new precision with a matching tail tolerance."""
        return replace(self, digits=digits, tail_tol=None)


def kummer_m(a: Real, b: Real, z: Real, prec: PrecisionPolicy) -> mpf:
    """Confluent hypergeometric M(a, b, z) by direct summation of its power series."""
    with mp.workdps(prec.digits + GUARD_DIGITS):
        a, b, z = mpf(a), mpf(b), mpf(z)
        if b <= 0 and b == mp.floor(b):
            raise DomainError(f"Kummer M undefined for b = {mp.nstr(b, 8)}.")
        if not mp.isfinite(z):
            raise DomainError("Kummer M needs a finite argument.")
        term = mpf(1)
        total = mpf(1)
        quiet = 0
        for k in range(prec.max_terms):
            term *= (a + k) * z / ((b + k) * (k + 1))
            total += term
            if abs(term) <= prec.tail_tol * abs(total):
                quiet += 1
                if quiet >= QUIET_TERMS:
                    return +total
            else:
                quiet = 0
        raise ConvergenceError(
            f"Kummer M({mp.nstr(a, 8)}, {mp.nstr(b, 8)}, {mp.nstr(z, 8)}) "
            f"did not converge within {prec.max_terms} terms."
        )


def pcf_d(nu: Real, z: Real, prec: PrecisionPolicy) -> mpf:
    """Parabolic cylinder function D_nu(z) for z >= 0 from two Kummer series.

    The Gamma reciprocals come from ``mp.rgamma`` so that a Gamma pole gives an
    exact zero coefficient and its series is skipped.
    """
    with mp.workdps(prec.digits + GUARD_DIGITS):
        nu, z = mpf(nu), mpf(z)
        if z < 0:
            raise DomainError("pcf_d is evaluated at non-negative z only.")
        half_z2 = z * z / 2
        even_coeff = mp.rgamma((1 - nu) / 2)
        odd_coeff = mp.rgamma(-nu / 2)
        even = even_coeff * kummer_m(-nu / 2, mpf(1) / 2, half_z2, prec) if even_coeff else mpf(0)
        odd = (
            mp.sqrt(2) * z * odd_coeff * kummer_m((1 - nu) / 2, mpf(3) / 2, half_z2, prec)
            if odd_coeff and z
            else mpf(0)
        )
        return +(mp.power(2, nu / 2) * mp.sqrt(mp.pi) * mp.exp(-z * z / 4) * (even - odd))


def pcf_d_pair(nu: Real, z: Real, prec: PrecisionPolicy) -> tuple[mpf, mpf]:
    """(D_nu(z), D'_nu(z)) sharing the D_nu evaluation."""
    with mp.workdps(prec.digits + GUARD_DIGITS):
        nu, z = mpf(nu), mpf(z)
        value = pcf_d(nu, z, prec)
        return value, +(nu * pcf_d(nu - 1, z, prec) - z / 2 * value)


def pcf_d_prime(nu: Real, z: Real, prec: PrecisionPolicy) -> mpf:
    """dD_nu/dz from the recurrence D'_nu(z) = nu D_{nu-1}(z) - (z/2) D_nu(z)."""
    return pcf_d_pair(nu, z, prec)[1]


def digamma(x: Real, prec: PrecisionPolicy) -> mpf:
    """psi_0(x) by upward shift into the asymptotic region x > 10*digits.

    psi(x) = psi(x + N) - sum_{j<N} 1/(x + j); the shifted value uses the
    Bernoulli-number asymptotic series.
    """
    with mp.workdps(prec.digits + GUARD_DIGITS):
        x = mpf(x)
        if x <= 0 and x == mp.floor(x):
            raise DomainError(f"digamma has a pole at {mp.nstr(x, 8)}.")
        threshold = 10 * prec.digits
        shift = mpf(0)
        while x <= threshold:
            shift += 1 / x
            x += 1
        inv_x2 = 1 / (x * x)
        result = mp.log(x) - 1 / (2 * x)
        power = inv_x2
        for k in range(1, prec.max_terms + 1):
            term = mp.bernoulli(2 * k) / (2 * k) * power
            result -= term
            if abs(term) <= prec.tail_tol * abs(result):
                break
            power *= inv_x2
        else:
            raise ConvergenceError("digamma asymptotic series did not converge.")
        return +(result - shift)


__all__ = [
    "PrecisionPolicy",
    "digamma",
    "kummer_m",
    "pcf_d",
    "pcf_d_pair",
    "pcf_d_prime",
]
