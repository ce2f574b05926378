"""Symmetric-subspace annealing Hamiltonian and its minimum spectral gap.

H(s) = (1 - s) H0 + s H1 restricted to the n+1 normalised Dicke states is
tridiagonal: the cost f(w) = w + b(w) sits on the diagonal and the transverse
field couples adjacent Hamming weights. The two lowest eigenvalues come from
Sturm-sequence bisection, which costs O(n) per pivot and needs no eigenvectors.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numba import njit
from scipy.special import gammaln

from tunnelgap.errors import (
    ConfigError,
    DegenerateError,
    DomainError,
    FlatMinimumWarning,
)
from tunnelgap.records import GapRecord

BarrierShape = Literal["square", "binomial"]
ALLOWED_SHAPES = ("square", "binomial")

DEFAULT_S_GRID = 512
MIN_S_GRID = 64
DEFAULT_REL_TOL = 1e-14
S_TOL = 1e-10
INV_PHI = (math.sqrt(5) - 1) / 2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BarrierSpec:
    """Shape and size scaling of the cost-function barrier b(w)."""

    shape: BarrierShape
    alpha: float
    height_coeff: float = 1.0
    width_coeff: float = 1.0
    center_fraction: float = 0.25

    def __post_init__(self) -> None:
        if self.shape not in ALLOWED_SHAPES:
            raise ConfigError(f"Barrier shape must be one of: {', '.join(ALLOWED_SHAPES)}.")
        if not 0 < self.alpha < 0.5:
            raise ConfigError("Barrier alpha must lie in (0, 1/2).")
        if self.height_coeff <= 0 or self.width_coeff <= 0:
            raise ConfigError("Barrier height and width coefficients must be positive.")
        if not 0 < self.center_fraction < 1:
            raise ConfigError("Barrier center_fraction must lie in (0, 1).")

    def width(self, n: int | float) -> float:
        """Continuous full width: width_coeff n^alpha (square) or n^(2 alpha) (binomial)."""
        power = self.alpha if self.shape == "square" else 2 * self.alpha
        return self.width_coeff * float(n) ** power


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        diag = np.ascontiguousarray(self.diag, dtype=np.float64)
        offdiag = np.ascontiguousarray(self.offdiag, dtype=np.float64)
        if diag.ndim != 1 or offdiag.ndim != 1 or diag.size == 0:
            raise ValueError("Tridiagonal entries must be non-empty 1-D arrays.")
        if offdiag.size != diag.size - 1:
            raise ValueError("Off-diagonal must be one shorter than the diagonal.")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise ValueError("Tridiagonal entries must be finite.")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self) -> int:
        return int(self.diag.size)

    def gershgorin(self) -> tuple[float, float]:
        """Interval containing every eigenvalue."""
        radius = np.zeros_like(self.diag)
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))


def _barrier_center(n: int, spec: BarrierSpec) -> int:
    # Half-up rounding, independent of Python's banker's rounding.
    return int(math.floor(spec.center_fraction * n + 0.5))


def _binomial_order(n: int, spec: BarrierSpec) -> int:
    return 2 * int(math.floor(spec.width(n) / 2))


def barrier_profile(n: int, spec: BarrierSpec | None) -> np.ndarray:
    """Barrier b(w) for every Hamming weight w = 0..n."""
    weights = np.arange(n + 1, dtype=np.float64)
    if spec is None:
        return np.zeros(n + 1)
    height = spec.height_coeff * float(n) ** spec.alpha
    if spec.shape == "square":
        inside = np.abs(weights - spec.center_fraction * n) <= spec.width(n) / 2
        return np.where(inside, height, 0.0)

    order = _binomial_order(n, spec)
    center = _barrier_center(n, spec)
    offset = weights - center + order // 2
    inside = (offset >= 0) & (offset <= order)
    k = np.clip(offset, 0, order)
    peak = order // 2
    log_ratio = (
        gammaln(peak + 1) + gammaln(order - peak + 1) - gammaln(k + 1) - gammaln(order - k + 1)
    )
    return np.where(inside, height * np.exp(log_ratio), 0.0)


def barrier_value(w: int, n: int, spec: BarrierSpec | None) -> float:
    """Barrier height b(w) at Hamming weight w."""
    if not 0 <= w <= n:
        raise DomainError(f"Hamming weight {w} outside [0, {n}].")
    return float(barrier_profile(n, spec)[w])


def build_hamiltonian(n: int, s: float, spec: BarrierSpec | None) -> TridiagonalMatrix:
    """Tridiagonal H(s) on the symmetric subspace (weights 0..n)."""
    weights = np.arange(n + 1, dtype=np.float64)
    diag = s * (weights + barrier_profile(n, spec))
    lower = weights[:-1]
    offdiag = -(1.0 - s) * np.sqrt((lower + 1.0) * (n - lower))
    return TridiagonalMatrix(diag, offdiag)


@njit(cache=False)
def _sturm_kernel(diag, offdiag_sq, shift, pivmin):  # pragma: no cover - compiled
    count = 0
    q = diag[0] - shift
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, diag.shape[0]):
        q = diag[i] - shift - offdiag_sq[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=False)
def _bisect_kernel(diag, offdiag_sq, k, lo, hi, tol, pivmin):  # pragma: no cover - compiled
    # Invariant: count(lo) <= k < count(hi).
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _sturm_kernel(diag, offdiag_sq, mid, pivmin) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _pivmin(offdiag: np.ndarray) -> float:
    largest = float(np.max(offdiag * offdiag)) if offdiag.size else 0.0
    return float(np.finfo(np.float64).tiny) * max(1.0, largest)


def sturm_count(m: TridiagonalMatrix, shift: float) -> int:
    """Number of eigenvalues of m strictly below ``shift`` (LDL^T pivot signs)."""
    offdiag_sq = m.offdiag * m.offdiag
    return int(_sturm_kernel(m.diag, offdiag_sq, float(shift), _pivmin(m.offdiag)))


def _block_bounds(m: TridiagonalMatrix) -> list[tuple[int, int]]:
    """(start, stop) index pairs of the irreducible diagonal blocks of m."""
    cuts = np.flatnonzero(m.offdiag == 0.0)
    edges = [0, *(int(cut) + 1 for cut in cuts), m.size]
    return list(zip(edges[:-1], edges[1:]))


def _block_lowest(block: TridiagonalMatrix, count: int, rel_tol: float) -> list[float]:
    lo, hi = block.gershgorin()
    diameter = max(hi - lo, np.finfo(np.float64).tiny)
    pivmin = _pivmin(block.offdiag)
    lo -= 2 * np.finfo(np.float64).eps * diameter + pivmin
    hi += 2 * np.finfo(np.float64).eps * diameter + pivmin
    tol = rel_tol * diameter
    offdiag_sq = block.offdiag * block.offdiag
    values: list[float] = []
    for k in range(min(count, block.size)):
        lower = values[-1] - tol if values else lo
        values.append(float(_bisect_kernel(block.diag, offdiag_sq, k, lower, hi, tol, pivmin)))
    return values


def lowest_two_eigenvalues(
    m: TridiagonalMatrix, rel_tol: float = DEFAULT_REL_TOL
) -> tuple[float, float]:
    """The two smallest eigenvalues, bisected from Gershgorin bounds.

    Zero couplings split the matrix into independent blocks; each block's
    lowest two values are found separately and the spectra merged.
    """
    if rel_tol <= 0:
        raise ConfigError("Eigenvalue rel_tol must be positive.")
    if m.size < 2:
        raise DegenerateError("A 1x1 matrix has no second eigenvalue.")
    bounds = _block_bounds(m)
    if len(bounds) == 1:
        values = _block_lowest(m, 2, rel_tol)
    else:
        logger.debug("Splitting tridiagonal matrix into %d blocks.", len(bounds))
        singles = [start for start, stop in bounds if stop - start == 1]
        values = np.sort(m.diag[singles])[:2].tolist()
        for start, stop in bounds:
            if stop - start > 1:
                block = TridiagonalMatrix(m.diag[start:stop], m.offdiag[start : stop - 1])
                values.extend(_block_lowest(block, 2, rel_tol))
    values = sorted(float(value) for value in values)
    return values[0], values[1]


def gap_at_s(
    n: int, s: float, spec: BarrierSpec | None, rel_tol: float = DEFAULT_REL_TOL
) -> float:
    """Spectral gap lambda1 - lambda0 of H(s)."""
    low, high = lowest_two_eigenvalues(build_hamiltonian(n, s, spec), rel_tol)
    return high - low


def _golden_section(
    n: int,
    spec: BarrierSpec | None,
    rel_tol: float,
    lo: float,
    hi: float,
    best_s: float,
    best_gap: float,
) -> tuple[float, float]:
    """Golden-section refinement on [lo, hi]; returns the best (s, gap) seen."""
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    gc = gap_at_s(n, c, spec, rel_tol)
    gd = gap_at_s(n, d, spec, rel_tol)
    for s_value, gap in ((c, gc), (d, gd)):
        if gap < best_gap:
            best_s, best_gap = s_value, gap
    iterations = 0
    while hi - lo > S_TOL:
        if gc < gd:
            hi, d, gd = d, c, gc
            c = hi - INV_PHI * (hi - lo)
            gc = gap_at_s(n, c, spec, rel_tol)
        else:
            lo, c, gc = c, d, gd
            d = lo + INV_PHI * (hi - lo)
            gd = gap_at_s(n, d, spec, rel_tol)
        for s_value, gap in ((c, gc), (d, gd)):
            if gap < best_gap:
                best_s, best_gap = s_value, gap
        iterations += 1
    logger.debug("Golden-section refinement for n=%s took %d iterations.", n, iterations)
    return best_s, best_gap


def min_gap_discrete(
    n: int,
    spec: BarrierSpec | None,
    s_grid: int = DEFAULT_S_GRID,
    rel_tol: float = DEFAULT_REL_TOL,
) -> GapRecord:
    """Minimum over s of the discrete gap: uniform s scan, then golden-section refinement."""
    if s_grid < MIN_S_GRID:
        raise ConfigError(f"s_grid must be >= {MIN_S_GRID}.")
    s_values = np.linspace(0.0, 1.0, s_grid)
    gaps = np.array([gap_at_s(n, float(s), spec, rel_tol) for s in s_values])
    index = int(np.argmin(gaps))

    three = np.sort(gaps)[:3]
    if three[2] - three[0] < rel_tol:
        message = f"Flat s-grid minimum for n={n}: three smallest gaps within {rel_tol:g}."
        logger.warning(message)
        warnings.warn(message, FlatMinimumWarning, stacklevel=2)

    lo = float(s_values[max(index - 1, 0)])
    hi = float(s_values[min(index + 1, s_grid - 1)])
    s_star, gap = _golden_section(
        n, spec, rel_tol, lo, hi, float(s_values[index]), float(gaps[index])
    )
    alpha = spec.alpha if spec is not None else 0.0
    logger.debug("n=%s alpha=%s: g_min=%.12g at s*=%.10f", n, alpha, gap, s_star)
    return GapRecord(
        n=n, alpha=alpha, method="discrete", gap=gap, log_gap=math.log(gap), s_star=s_star
    )


def width_transition_ns(n_min: int, n_max: int, spec: BarrierSpec) -> list[int]:
    """Integers n in [n_min, n_max] where floor(width(n)) just increased."""
    start = max(int(math.ceil(n_min)), 2)
    stop = int(math.floor(n_max))
    if stop < start:
        return []
    ns = np.arange(start - 1, stop + 1, dtype=np.float64)
    power = spec.alpha if spec.shape == "square" else 2 * spec.alpha
    floors = np.floor(spec.width_coeff * ns**power)
    jumps = np.flatnonzero(np.diff(floors) > 0) + 1
    return [int(ns[i]) for i in jumps]


__all__ = [
    "ALLOWED_SHAPES",
    "BarrierSpec",
    "GapRecord",
    "TridiagonalMatrix",
    "barrier_profile",
    "barrier_value",
    "build_hamiltonian",
    "gap_at_s",
    "lowest_two_eigenvalues",
    "min_gap_discrete",
    "sturm_count",
    "width_transition_ns",
]
