"""Continuous double-well model and its exact gap from the eigenenergy matching condition.

The well is omega^2 x^2 outside |x| < a and a flat barrier of height
omega eps^(1-alpha) inside. Outside the barrier the solutions are parabolic
cylinder functions D_nu(sqrt(2 omega / eps) |x|); inside they are cosh / sinh
of k x. Matching logarithmic derivatives at x = a gives one transcendental
condition per parity, whose smallest roots are E_+ (even, ground state) and
E_- (odd, first excited state).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal

from mpmath import mp, mpf

from tunnelgap.errors import (
    ConvergenceError,
    NoRootError,
    PrecisionCeilingError,
    RegimeError,
)
from tunnelgap.records import GapRecord, gap_from_log
from tunnelgap.specfun import GUARD_DIGITS, PrecisionPolicy, pcf_d_pair

Parity = Literal["even", "odd"]

DEFAULT_OMEGA = 4.0 / 3.0
DEFAULT_C = 8.0 / (3.0 * (math.sqrt(3.0) - 1.0))
DEFAULT_SCAN_POINTS = 4096
DEFAULT_MIN_BARRIER_RATIO = 4.0
DEFAULT_MAX_DIGITS = 4096
DEFAULT_GAP_RTOL = 1e-6
SCAN_CAP = 8  # in units of omega (cE scale)
SCAN_FLOOR = mpf("1e-6")  # in units of omega

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContinuousModel:
    """Rescaled well parameters for a (possibly non-integer) problem size n.

    ``barrier_scale`` multiplies the barrier height only and ``width_scale``
    the barrier half-width; both are 1 for the physical model, and
    ``width_scale = 0`` is the pure harmonic well.
    """

    n: float
    alpha: float
    omega: float = DEFAULT_OMEGA
    c: float = DEFAULT_C
    barrier_scale: float = 1.0
    width_scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.n > 0:
            raise RegimeError(f"Problem size n must be positive, got {self.n}.")
        if not 0.25 < self.alpha < 0.5:
            raise RegimeError(f"Continuous model needs 1/4 < alpha < 1/2, got {self.alpha}.")
        if self.omega <= 0 or self.c <= 0:
            raise RegimeError("omega and c must be positive.")
        if self.barrier_scale <= 0 or self.width_scale < 0:
            raise RegimeError("barrier_scale must be positive and width_scale non-negative.")

    # Derived quantities are evaluated at the caller's working precision.
    @property
    def epsilon(self) -> mpf:
        return 2 / mpf(self.n)

    @property
    def a(self) -> mpf:
        return mpf(self.width_scale) * self.epsilon ** (1 - mpf(self.alpha)) / 2

    @property
    def barrier_height(self) -> mpf:
        return mpf(self.barrier_scale) * mpf(self.omega) * self.epsilon ** (1 - mpf(self.alpha))

    @property
    def outer_scale(self) -> mpf:
        """sqrt(2 omega / eps), the factor mapping x to the D_nu argument."""
        return mp.sqrt(2 * mpf(self.omega) / self.epsilon)

    @property
    def z0(self) -> mpf:
        return self.outer_scale * self.a

    @property
    def barrier_top(self) -> mpf:
        """Barrier top on the cE scale: barrier_scale * omega * eps^(-alpha)."""
        return mpf(self.barrier_scale) * mpf(self.omega) * self.epsilon ** (-mpf(self.alpha))


@dataclass(frozen=True)
class MatchingContext:
    """Energy-dependent quantities entering the matching condition."""

    parity: Parity
    E: mpf
    nu: mpf
    k: mpf


def matching_context(model: ContinuousModel, parity: Parity, E: mpf) -> MatchingContext:
    """nu = cE/(2 omega) - 1/2 and the under-barrier decay rate k."""
    E = mpf(E)
    c_e = mpf(model.c) * E
    nu = c_e / (2 * mpf(model.omega)) - mpf(1) / 2
    k_squared = (model.barrier_top - c_e) / model.epsilon
    if k_squared <= 0:
        raise RegimeError(
            f"Energy cE={mp.nstr(c_e, 10)} is at or above the barrier top "
            f"{mp.nstr(model.barrier_top, 10)}."
        )
    return MatchingContext(parity=parity, E=E, nu=nu, k=mp.sqrt(k_squared))


def matching_function(
    model: ContinuousModel, parity: Parity, E: mpf, prec: PrecisionPolicy
) -> mpf:
    """F_+/-(E) = k D (e^{ka} -/+ e^{-ka}) - sqrt(2 omega/eps) D' (e^{ka} +/- e^{-ka}).

    Upper signs are the even parity. When k a exceeds ln(10^digits) the common
    factor e^{ka} is divided out, which leaves the roots unchanged.
    """
    with mp.workdps(prec.digits + GUARD_DIGITS):
        ctx = matching_context(model, parity, E)
        z0 = model.z0
        value, slope = pcf_d_pair(ctx.nu, z0, prec)
        ka = ctx.k * model.a
        if ka > prec.digits * mp.ln10:
            damped = mp.exp(-2 * ka)
            plus, minus = 1 + damped, 1 - damped
        else:
            grow, decay = mp.exp(ka), mp.exp(-ka)
            plus, minus = grow + decay, grow - decay
        if parity == "even":
            return +(ctx.k * value * minus - model.outer_scale * slope * plus)
        return +(ctx.k * value * plus - model.outer_scale * slope * minus)


def _check_tunneling_regime(model: ContinuousModel, min_barrier_ratio: float) -> None:
    if model.barrier_top <= min_barrier_ratio * mpf(model.omega):
        raise RegimeError(
            f"Barrier top {mp.nstr(model.barrier_top, 8)} is not above "
            f"{min_barrier_ratio} omega at n={model.n:g}, alpha={model.alpha}: "
            "outside the tunneling regime."
        )


def min_tunneling_n(alpha: float, min_barrier_ratio: float = DEFAULT_MIN_BARRIER_RATIO) -> float:
    """Smallest n whose barrier top exceeds min_barrier_ratio * omega: 2 r^(1/alpha)."""
    return 2.0 * min_barrier_ratio ** (1.0 / alpha)


def _scan_for_sign_change(
    value_at: Callable[[mpf], mpf],
    low: mpf,
    high: mpf,
    scan_points: int,
) -> tuple[mpf, mpf, mpf] | None:
    """First (left, right, f(left)) on the uniform grid over [low, high] with a sign change."""
    step = (high - low) / scan_points
    left, f_left = low, value_at(low)
    for index in range(1, scan_points + 1):
        right = low + index * step
        f_right = value_at(right)
        if f_right == 0:
            return right, right, f_right
        if f_left * f_right < 0:
            return left, right, f_left
        left, f_left = right, f_right
    return None


def _seeded_bracket(
    value_at: Callable[[mpf], mpf], seed: tuple[mpf, mpf]
) -> tuple[mpf, mpf, mpf] | None:
    left, right = seed
    f_left, f_right = value_at(left), value_at(right)
    if f_left * f_right < 0:
        return left, right, f_left
    return None


def solve_parity_energy(
    model: ContinuousModel,
    parity: Parity,
    prec: PrecisionPolicy,
    *,
    start: mpf | None = None,
    bracket: tuple[mpf, mpf] | None = None,
    scan_points: int = DEFAULT_SCAN_POINTS,
    min_barrier_ratio: float = DEFAULT_MIN_BARRIER_RATIO,
) -> mpf:
    """Smallest root E of the matching function for one parity.

    cE is scanned upward over (start, 8 omega] for the first sign change and
    the bracket is bisected to relative width 10^-(digits-8). ``start`` is an
    energy E (the odd scan starts at the even root). A ``bracket`` (E_lo, E_hi)
    known from a lower precision skips the scan when its ends still differ in
    sign.
    """
    with mp.workdps(prec.digits + GUARD_DIGITS):
        _check_tunneling_regime(model, min_barrier_ratio)
        omega, c = mpf(model.omega), mpf(model.c)

        def value_at(c_e: mpf) -> mpf:
            return matching_function(model, parity, c_e / c, prec)

        found = None
        if bracket is not None:
            found = _seeded_bracket(value_at, (c * mpf(bracket[0]), c * mpf(bracket[1])))
            if found is None:
                logger.debug("Seed bracket lost the %s sign change; rescanning.", parity)
        if found is None:
            low = SCAN_FLOOR * omega if start is None else c * mpf(start)
            high = min(SCAN_CAP * omega, model.barrier_top * (1 - mpf("1e-9")))
            if high <= low:
                raise NoRootError(f"Empty {parity} scan interval at n={model.n:g}.")
            found = _scan_for_sign_change(value_at, low, high, scan_points)
            if found is None:
                raise NoRootError(
                    f"No {parity} sign change for cE in ({mp.nstr(low, 8)}, {mp.nstr(high, 8)}] "
                    f"at n={model.n:g}, alpha={model.alpha}."
                )

        left, right, f_left = found
        if f_left == 0 or left == right:
            logger.debug("Exact %s root hit on the scan grid.", parity)
            return +(right / c)
        rel_width = mpf(10) ** (-(prec.digits - 8))
        iterations = 0
        while right - left > rel_width * abs(left + right) / 2:
            mid = (left + right) / 2
            f_mid = value_at(mid)
            if f_mid == 0:
                left = right = mid
                break
            if f_left * f_mid < 0:
                right = mid
            else:
                left, f_left = mid, f_mid
            iterations += 1
        logger.debug(
            "%s root at n=%g: cE=%s after %d bisections (digits=%d).",
            parity,
            model.n,
            mp.nstr((left + right) / 2, 15),
            iterations,
            prec.digits,
        )
        return +((left + right) / 2 / c)


def solve_energies(
    model: ContinuousModel,
    prec: PrecisionPolicy,
    *,
    brackets: tuple[tuple[mpf, mpf], tuple[mpf, mpf]] | None = None,
    scan_points: int = DEFAULT_SCAN_POINTS,
    min_barrier_ratio: float = DEFAULT_MIN_BARRIER_RATIO,
) -> tuple[mpf, mpf]:
    """(E_+, E_-): even root first, then the odd scan starting at the even root."""
    even_seed, odd_seed = brackets if brackets is not None else (None, None)
    even = solve_parity_energy(
        model,
        "even",
        prec,
        bracket=even_seed,
        scan_points=scan_points,
        min_barrier_ratio=min_barrier_ratio,
    )
    odd = solve_parity_energy(
        model,
        "odd",
        prec,
        start=even,
        bracket=odd_seed,
        scan_points=scan_points,
        min_barrier_ratio=min_barrier_ratio,
    )
    return even, odd


def _seed_around(root: mpf, digits: int) -> tuple[mpf, mpf]:
    """Bracket for the next precision level, far wider than the root's error."""
    with mp.workdps(digits + GUARD_DIGITS):
        margin = mpf(10) ** -(digits // 2)
        return root * (1 - margin), root * (1 + margin)


def initial_digits(model: ContinuousModel, prec: PrecisionPolicy) -> int:
    """Starting precision large enough for E_- - E_+ to survive cancellation."""
    eps = 2.0 / float(model.n)
    exponent = (1.0 - 3.0 * model.alpha) / 2.0
    decay_digits = math.sqrt(model.omega) * math.exp(exponent * math.log(eps)) * math.log10(math.e)
    return max(prec.digits, 20 + int(math.ceil(decay_digits)))


def continuous_gap(
    n: float,
    alpha: float,
    omega: float = DEFAULT_OMEGA,
    c: float = DEFAULT_C,
    prec: PrecisionPolicy | None = None,
    *,
    max_digits: int = DEFAULT_MAX_DIGITS,
    gap_rtol: float = DEFAULT_GAP_RTOL,
    scan_points: int = DEFAULT_SCAN_POINTS,
    min_barrier_ratio: float = DEFAULT_MIN_BARRIER_RATIO,
    barrier_scale: float = 1.0,
    width_scale: float = 1.0,
) -> GapRecord:
    """Exact continuous gap E_- - E_+ at adaptive precision.

    Precision doubles until two successive gaps agree to ``gap_rtol``; the
    returned gap and ``digits_used`` belong to the last (highest) precision.
    """
    prec = prec or PrecisionPolicy(digits=30)
    model = ContinuousModel(
        n=n,
        alpha=alpha,
        omega=omega,
        c=c,
        barrier_scale=barrier_scale,
        width_scale=width_scale,
    )
    digits = initial_digits(model, prec)
    if digits > max_digits:
        raise PrecisionCeilingError(
            f"n={n:g}, alpha={alpha} needs {digits} digits, above the cap {max_digits}."
        )

    previous = None
    seeds = None
    while True:
        policy = prec.with_digits(digits)
        even, odd = solve_energies(
            model,
            policy,
            brackets=seeds,
            scan_points=scan_points,
            min_barrier_ratio=min_barrier_ratio,
        )
        with mp.workdps(digits + GUARD_DIGITS):
            gap = odd - even
            if gap <= 0:
                raise ConvergenceError(
                    f"Odd level not above even level at n={n:g}, alpha={alpha} (digits={digits})."
                )
            if previous is not None and abs(gap - previous) <= gap_rtol * gap:
                log_gap = float(mp.log(gap))
                break
        logger.debug("n=%g alpha=%s digits=%d gap=%s", n, alpha, digits, mp.nstr(gap, 12))
        previous = gap
        seeds = (_seed_around(even, digits), _seed_around(odd, digits))
        if 2 * digits > max_digits:
            raise PrecisionCeilingError(
                f"Gap at n={n:g}, alpha={alpha} not converged below the {max_digits}-digit cap."
            )
        digits *= 2

    logger.info("Continuous gap n=%g alpha=%s: log_gap=%.12g (digits=%d)", n, alpha, log_gap, digits)
    return GapRecord(
        n=n,
        alpha=alpha,
        method="continuous",
        gap=gap_from_log(log_gap),
        log_gap=log_gap,
        digits_used=digits,
    )


__all__ = [
    "ContinuousModel",
    "DEFAULT_C",
    "DEFAULT_OMEGA",
    "MatchingContext",
    "continuous_gap",
    "initial_digits",
    "matching_context",
    "matching_function",
    "min_tunneling_n",
    "solve_energies",
    "solve_parity_energy",
]
