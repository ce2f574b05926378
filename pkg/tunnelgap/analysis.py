"""Scaling diagnostics for g_min(n): power-law and stretched-exponential fits,
binned fits, the derivative ratio R = f''/f' and threshold-n searches.

Everything works on f = ln g_min against x = ln n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from tunnelgap.asymptotic import classify_region, gap_first_order
from tunnelgap.continuous import DEFAULT_C, DEFAULT_OMEGA, continuous_gap
from tunnelgap.errors import (
    BracketError,
    ConvergenceError,
    DegenerateError,
    EmptyBinError,
    InputDataError,
    NonMonotoneError,
    NonUniformGridError,
    RegimeError,
)
from tunnelgap.records import GapRecord
from tunnelgap.specfun import PrecisionPolicy

FitModel = Literal["power", "exponential"]

Q_BRACKET = (0.01, 1.0)
Q_TOL = 1e-10
SLOPE_FLOOR = 1e-12
UNIFORM_RTOL = 1e-9
THRESHOLD_RTOL = 1e-3
MONOTONE_PROBES = 8
INV_PHI = (math.sqrt(5) - 1) / 2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeriesPoint:
    """One (n, gap) sample; ``log_gap`` takes precedence when set."""

    n: float
    gap: float | None = None
    log_gap: float | None = None

    @property
    def f(self) -> float:
        if self.log_gap is not None:
            return self.log_gap
        if self.gap is None or not self.gap > 0:
            raise InputDataError(f"Point at n={self.n:g} has neither a positive gap nor a log_gap.")
        return math.log(self.gap)


@dataclass(frozen=True)
class ScalingSeries:
    """Gap samples ordered by strictly increasing n."""

    points: tuple[SeriesPoint, ...]
    alpha: float | None = None
    method: str | None = None

    def __post_init__(self) -> None:
        points = tuple(self.points)
        object.__setattr__(self, "points", points)
        for point in points:
            if not point.n > 0:
                raise InputDataError(f"Series n values must be positive, got {point.n}.")
        for before, after in zip(points, points[1:]):
            if after.n == before.n:
                raise DegenerateError(f"Series repeats n={after.n:g}.")
            if not after.n > before.n:
                raise InputDataError(
                    f"Series n values must be strictly increasing ({before.n:g} then {after.n:g})."
                )

    @classmethod
    def from_records(cls, records: Iterable[GapRecord]) -> ScalingSeries:
        """Series from gap records of a single (alpha, method), sorted by n."""
        ordered = sorted(records, key=lambda record: record.n)
        points = tuple(SeriesPoint(r.n, r.gap, r.log_gap) for r in ordered)
        alpha = ordered[0].alpha if ordered else None
        method = ordered[0].method if ordered else None
        return cls(points, alpha=alpha, method=method)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def x(self) -> np.ndarray:
        return np.log(np.array([point.n for point in self.points], dtype=np.float64))

    @property
    def f(self) -> np.ndarray:
        return np.array([point.f for point in self.points], dtype=np.float64)

    def restrict(self, n_lo: float, n_hi: float) -> ScalingSeries:
        """Sub-series with n_lo <= n <= n_hi."""
        kept = tuple(p for p in self.points if n_lo <= p.n <= n_hi)
        return ScalingSeries(kept, alpha=self.alpha, method=self.method)


@dataclass(frozen=True)
class FitResult:
    """Fitted scaling law; only the declared model's parameters are populated.

    power: g = A n^-p. exponential: g = B exp(-C n^q). ``residual`` is the
    RMS of the f = ln g residuals.
    """

    model: FitModel
    residual: float
    n_range: tuple[float, float]
    A: float | None = None
    p: float | None = None
    B: float | None = None
    C: float | None = None
    q: float | None = None
    at_boundary: bool = False


@dataclass(frozen=True)
class RatioPoint:
    """Derivative ratio R = f''/f' at an interior grid point."""

    n: float
    R: float


@dataclass
class RatioReport:
    """Ratio points plus the interior n values dropped for a vanishing slope."""

    points: list[RatioPoint]
    omitted: list[float] = field(default_factory=list)


def _rms(residuals: np.ndarray) -> float:
    return float(np.sqrt(np.mean(residuals * residuals)))


def power_fit(series: ScalingSeries) -> FitResult:
    """Least-squares line through (ln n, ln g): slope -p, intercept ln A."""
    if len(series) < 2:
        raise InputDataError("A power-law fit needs at least 2 points.")
    x, f = series.x, series.f
    if np.ptp(x) == 0:
        raise DegenerateError("All n values are equal; the power-law fit is undetermined.")
    design = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(design, f, rcond=None)
    residual = _rms(f - design @ np.array([intercept, slope]))
    return FitResult(
        model="power",
        A=float(math.exp(intercept)),
        p=float(-slope),
        residual=residual,
        n_range=(series.points[0].n, series.points[-1].n),
    )


def binned_power_fits(
    series: ScalingSeries, bins: Sequence[tuple[float, float]]
) -> list[FitResult]:
    """power_fit on each [n_lo, n_hi] bin, in the order given."""
    subsets = [series.restrict(lo, hi) for lo, hi in bins]
    empty = [tuple(b) for b, subset in zip(bins, subsets) if len(subset) < 2]
    if empty:
        raise EmptyBinError(empty)
    return [power_fit(subset) for subset in subsets]


def decade_bins(n_min: float, n_max: float) -> list[tuple[float, float]]:
    """Consecutive [10^k, 10^(k+1)] bins covering [n_min, n_max]."""
    low = math.floor(math.log10(n_min) + 1e-12)
    high = math.ceil(math.log10(n_max) - 1e-12)
    return [(10.0**k, 10.0 ** (k + 1)) for k in range(low, max(high, low + 1))]


def _exponential_inner(x: np.ndarray, f: np.ndarray, q: float) -> tuple[float, float, float]:
    # f = ln B - C e^{qx} is linear in (ln B, C) for fixed q.
    design = np.column_stack([np.ones_like(x), -np.exp(q * x)])
    (log_b, c_coeff), *_ = np.linalg.lstsq(design, f, rcond=None)
    return float(log_b), float(c_coeff), _rms(f - design @ np.array([log_b, c_coeff]))


def exponential_fit(series: ScalingSeries, *, strict: bool = False) -> FitResult:
    """Fit g = B exp(-C n^q) by golden-section search over q in [0.01, 1].

    An optimum pinned to the bracket edge is returned with ``at_boundary=True``,
    or raises ``ConvergenceError`` when ``strict``.
    """
    if len(series) < 4:
        raise InputDataError("An exponential fit needs at least 4 points.")
    x, f = series.x, series.f
    if np.ptp(x) == 0:
        raise DegenerateError("All n values are equal; the exponential fit is undetermined.")

    lo, hi = Q_BRACKET
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    rc = _exponential_inner(x, f, c)[2]
    rd = _exponential_inner(x, f, d)[2]
    while hi - lo > Q_TOL:
        if rc < rd:
            hi, d, rd = d, c, rc
            c = hi - INV_PHI * (hi - lo)
            rc = _exponential_inner(x, f, c)[2]
        else:
            lo, c, rc = c, d, rd
            d = lo + INV_PHI * (hi - lo)
            rd = _exponential_inner(x, f, d)[2]
    q = (lo + hi) / 2
    log_b, c_coeff, residual = _exponential_inner(x, f, q)

    at_boundary = min(q - Q_BRACKET[0], Q_BRACKET[1] - q) < 10 * Q_TOL
    if at_boundary:
        message = f"Exponential fit q={q:.6g} sits on the search bracket edge {Q_BRACKET}."
        if strict:
            raise ConvergenceError(message)
        logger.warning(message)
    return FitResult(
        model="exponential",
        B=math.exp(log_b),
        C=c_coeff,
        q=q,
        residual=residual,
        n_range=(series.points[0].n, series.points[-1].n),
        at_boundary=at_boundary,
    )


def derivative_ratio(series: ScalingSeries) -> RatioReport:
    """R = f''/f' at interior points of a grid uniform in x = ln n (central differences)."""
    if len(series) < 3:
        raise InputDataError("The derivative ratio needs at least 3 points.")
    x, f = series.x, series.f
    steps = np.diff(x)
    h = float(np.mean(steps))
    if np.max(np.abs(steps - h)) > UNIFORM_RTOL * abs(h):
        raise NonUniformGridError("Series is not uniformly spaced in ln n.")

    first = (f[2:] - f[:-2]) / (2 * h)
    second = (f[2:] - 2 * f[1:-1] + f[:-2]) / (h * h)
    report = RatioReport(points=[])
    for point, slope, curvature in zip(series.points[1:-1], first, second):
        if abs(slope) < SLOPE_FLOOR:
            report.omitted.append(point.n)
            continue
        report.points.append(RatioPoint(n=point.n, R=float(curvature / slope)))
    if report.omitted:
        logger.warning(
            "Omitted %d ratio points with |f'| < %g: %s",
            len(report.omitted),
            SLOPE_FLOOR,
            ", ".join(f"{n:g}" for n in report.omitted),
        )
    return report


def log_grid(n_min: float, n_max: float, points_per_decade: int) -> list[float]:
    """n_min * 10^(k/points_per_decade) for every k that stays at or below n_max."""
    decades = math.log10(n_max / n_min)
    count = int(math.floor(decades * points_per_decade + 1e-9))
    if count < 1:
        return [float(n_min)]
    return [float(n_min * 10.0 ** (k / points_per_decade)) for k in range(count + 1)]


def continuous_ratio(
    alpha: float,
    omega: float = DEFAULT_OMEGA,
    c: float = DEFAULT_C,
    prec: PrecisionPolicy | None = None,
    **solver_options: object,
) -> Callable[[float], float]:
    """ratio(n) = continuous gap / leading-order asymptotic gap, formed from log gaps."""

    def ratio(n: float) -> float:
        exact = continuous_gap(n, alpha, omega, c, prec, **solver_options)  # type: ignore[arg-type]
        leading = gap_first_order(n, alpha, omega, c)
        return math.exp(exact.f - leading.f)

    return ratio


def threshold_n_ratio(
    alpha: float,
    v: float,
    n_lo: float,
    n_hi: float,
    *,
    omega: float = DEFAULT_OMEGA,
    c: float = DEFAULT_C,
    prec: PrecisionPolicy | None = None,
    ratio: Callable[[float], float] | None = None,
    rtol: float = THRESHOLD_RTOL,
) -> float:
    """n at which ratio(n) crosses v, by bisection on ln n.

    ``ratio`` defaults to continuous gap / leading-order gap. The ratio must
    increase monotonically over [n_lo, n_hi] on an 8-point log grid.
    """
    if classify_region(alpha) != "polynomial":
        raise RegimeError(f"Threshold search needs 1/4 < alpha < 1/3, got {alpha}.")
    if not 0 < v < 1:
        raise RegimeError(f"Threshold v must lie in (0, 1), got {v}.")
    if not 0 < n_lo < n_hi:
        raise BracketError(f"Need 0 < n_lo < n_hi, got [{n_lo:g}, {n_hi:g}].")
    ratio = ratio or continuous_ratio(alpha, omega, c, prec)

    probes = np.exp(np.linspace(math.log(n_lo), math.log(n_hi), MONOTONE_PROBES))
    values = [ratio(float(n)) for n in probes]
    if not (values[0] < v < values[-1]):
        raise BracketError(
            f"ratio({n_lo:g})={values[0]:.6g} and ratio({n_hi:g})={values[-1]:.6g} "
            f"do not bracket v={v}."
        )
    if any(after <= before for before, after in zip(values, values[1:])):
        raise NonMonotoneError(
            "Gap ratio is not increasing across the bracket: "
            + ", ".join(f"{value:.6g}" for value in values)
        )

    # Start from the probe interval that contains the crossing.
    index = next(i for i, value in enumerate(values) if value >= v)
    low, high = math.log(probes[index - 1]), math.log(probes[index])
    while high - low > math.log1p(rtol):
        mid = (low + high) / 2
        if ratio(math.exp(mid)) < v:
            low = mid
        else:
            high = mid
    crossing = math.exp((low + high) / 2)
    logger.info("alpha=%s v=%s: ratio crosses at n=%.6g", alpha, v, crossing)
    return crossing


__all__ = [
    "FitResult",
    "RatioPoint",
    "RatioReport",
    "ScalingSeries",
    "SeriesPoint",
    "binned_power_fits",
    "continuous_ratio",
    "decade_bins",
    "derivative_ratio",
    "exponential_fit",
    "log_grid",
    "power_fit",
    "threshold_n_ratio",
]
