"""Parameter sweeps over (alpha, n) cells with an optional process pool."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Literal, Sequence

from tunnelgap.analysis import log_grid
from tunnelgap.asymptotic import gap_first_order, gap_second_order
from tunnelgap.continuous import continuous_gap
from tunnelgap.discrete import BarrierSpec, min_gap_discrete, width_transition_ns
from tunnelgap.errors import (
    ConfigError,
    InputDataError,
    RegimeError,
    SolverError,
    UserInputError,
    exit_code_for,
    format_error,
)
from tunnelgap.output import RecordRow
from tunnelgap.records import ALLOWED_METHODS, GapRecord, Method
from tunnelgap.specfun import PrecisionPolicy

IntegerNPolicy = Literal["exact_reals", "round_to_integer", "barrier_width_transitions"]
ALLOWED_N_POLICIES = ("exact_reals", "round_to_integer", "barrier_width_transitions")

# Failures recorded on the row instead of aborting the sweep.
CELL_ERRORS = (SolverError, RegimeError, InputDataError, ConfigError, UserInputError)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverSettings:
    """Model constants and solver controls shared by every cell of a run."""

    omega: float
    c: float
    digits: int = 30
    max_terms: int = 10000
    max_digits: int = 4096
    barrier: str = "square"
    height_coeff: float = 1.0
    width_coeff: float = 1.0
    center_fraction: float = 0.25
    s_grid: int = 512
    rel_tol: float = 1e-14
    n_cap: int = 2_000_000
    scan_points: int = 4096
    min_barrier_ratio: float = 4.0
    gap_rtol: float = 1e-6

    @classmethod
    def from_config(cls, config: dict[str, Any]) -> SolverSettings:
        model = config["model"]
        precision = config["precision"]
        discrete = config["discrete"]
        continuous = config["continuous"]
        return cls(
            omega=float(model["omega"]),
            c=float(model["c"]),
            digits=precision["digits"],
            max_terms=precision["max_terms"],
            max_digits=precision["max_digits"],
            barrier=discrete["barrier"],
            height_coeff=float(discrete["height_coeff"]),
            width_coeff=float(discrete["width_coeff"]),
            center_fraction=float(discrete["center_fraction"]),
            s_grid=discrete["s_grid"],
            rel_tol=float(discrete["rel_tol"]),
            n_cap=discrete["n_cap"],
            scan_points=continuous["scan_points"],
            min_barrier_ratio=float(continuous["min_barrier_ratio"]),
            gap_rtol=float(continuous["gap_rtol"]),
        )

    def precision(self) -> PrecisionPolicy:
        return PrecisionPolicy(digits=self.digits, max_terms=self.max_terms)

    def barrier_spec(self, alpha: float) -> BarrierSpec:
        return BarrierSpec(
            shape=self.barrier,  # type: ignore[arg-type]
            alpha=alpha,
            height_coeff=self.height_coeff,
            width_coeff=self.width_coeff,
            center_fraction=self.center_fraction,
        )


def discrete_size(n: float, n_cap: int) -> int:
    """Validate n as a discrete problem size (integer, 1 <= n <= n_cap)."""
    if not float(n).is_integer() or n < 1:
        raise UserInputError(f"Discrete method needs an integer n >= 1, got {n:g}.")
    if n > n_cap:
        raise UserInputError(f"Discrete n={n:g} exceeds the cap {n_cap}.")
    return int(n)


def compute_gap(method: Method, n: float, alpha: float, settings: SolverSettings) -> GapRecord:
    """Minimum gap for one (method, n, alpha) cell."""
    if method == "discrete":
        size = discrete_size(n, settings.n_cap)
        return min_gap_discrete(size, settings.barrier_spec(alpha), settings.s_grid, settings.rel_tol)
    if method == "continuous":
        return continuous_gap(
            n,
            alpha,
            settings.omega,
            settings.c,
            settings.precision(),
            max_digits=settings.max_digits,
            gap_rtol=settings.gap_rtol,
            scan_points=settings.scan_points,
            min_barrier_ratio=settings.min_barrier_ratio,
        )
    if method == "asymptotic1":
        return gap_first_order(n, alpha, settings.omega, settings.c)
    if method == "asymptotic2":
        return gap_second_order(n, alpha, settings.omega, settings.c, settings.precision())
    raise UserInputError(f"Unknown method: {method}")


@dataclass(frozen=True)
class SweepPlan:
    """A rectangular (alpha, n) sweep for one method."""

    n_min: float
    n_max: float
    alphas: tuple[float, ...]
    method: Method
    settings: SolverSettings
    points_per_decade: int = 16
    integer_n_policy: IntegerNPolicy = "exact_reals"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", tuple(self.alphas))
        if self.method not in ALLOWED_METHODS:
            raise UserInputError(f"Unknown method: {self.method}")
        if self.integer_n_policy not in ALLOWED_N_POLICIES:
            raise UserInputError(f"Unknown integer-n policy: {self.integer_n_policy}")
        if not 0 < self.n_min < self.n_max:
            raise UserInputError(f"Need 0 < nmin < nmax, got {self.n_min:g} and {self.n_max:g}.")
        if self.points_per_decade < 1:
            raise UserInputError("points_per_decade must be >= 1.")
        if not self.alphas:
            raise UserInputError("A sweep needs at least one alpha.")
        if self.method == "discrete":
            if self.integer_n_policy == "exact_reals":
                raise UserInputError("The discrete method needs an integer-n policy.")
            if self.n_max > self.settings.n_cap:
                raise UserInputError(
                    f"Discrete nmax={self.n_max:g} exceeds the cap {self.settings.n_cap}."
                )

    @property
    def omega(self) -> float:
        return self.settings.omega

    @property
    def c(self) -> float:
        return self.settings.c

    @property
    def precision_digits(self) -> int:
        return self.settings.digits

    def n_values(self, alpha: float) -> list[float]:
        """The n grid for one alpha under the plan's integer-n policy."""
        if self.integer_n_policy == "barrier_width_transitions":
            spec = self.settings.barrier_spec(alpha)
            return [float(n) for n in width_transition_ns(self.n_min, self.n_max, spec)]
        grid = log_grid(self.n_min, self.n_max, self.points_per_decade)
        if self.integer_n_policy == "round_to_integer":
            return [float(n) for n in sorted({max(1, int(round(value))) for value in grid})]
        return grid

    def cells(self) -> list[tuple[float, float]]:
        """(alpha, n) pairs sorted by alpha then n."""
        return sorted((alpha, n) for alpha in self.alphas for n in self.n_values(alpha))


@dataclass
class SweepResult:
    rows: list[RecordRow]

    @property
    def failures(self) -> list[RecordRow]:
        return [row for row in self.rows if row.error is not None]

    @property
    def records(self) -> list[GapRecord]:
        return [row.record for row in self.rows if row.record is not None]

    @property
    def exit_code(self) -> int:
        """0 when every row succeeded, else the code of the first failed row."""
        for row in self.rows:
            if row.error is not None:
                return row.exit_code
        return 0


def evaluate_cell(
    method: Method, n: float, alpha: float, settings: SolverSettings
) -> RecordRow:
    """One sweep row; solver and regime failures become an error row."""
    try:
        record = compute_gap(method, n, alpha, settings)
    except CELL_ERRORS as exc:
        logger.warning("Failed: method=%s alpha=%s n=%g (%s)", method, alpha, n, exc)
        return RecordRow(n, alpha, method, error=format_error(exc), exit_code=exit_code_for(exc))
    return RecordRow(n, alpha, method, record=record)


def _evaluate(task: tuple[Method, float, float, SolverSettings]) -> RecordRow:
    return evaluate_cell(*task)


def iter_sweep(plan: SweepPlan, workers: int = 1) -> Iterator[RecordRow]:
    """Yield rows in (alpha, n) order as soon as every earlier cell has finished."""
    tasks = [(plan.method, n, alpha, plan.settings) for alpha, n in plan.cells()]
    logger.info(
        "Sweep: method=%s, %d cells, %d worker(s).", plan.method, len(tasks), workers
    )
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_evaluate, task) for task in tasks]
            for future in futures:
                yield future.result()
    else:
        for task in tasks:
            yield _evaluate(task)


def run_sweep(
    plan: SweepPlan,
    workers: int = 1,
    on_row: Callable[[RecordRow], None] | None = None,
) -> SweepResult:
    """Evaluate every cell of the plan; output order never depends on scheduling.

    ``on_row`` sees each row in key order while later cells are still running.
    """
    rows = []
    for row in iter_sweep(plan, workers):
        rows.append(row)
        if on_row is not None:
            on_row(row)

    result = SweepResult(rows=rows)
    logger.info(
        "Sweep summary: %s succeeded, %s failed.",
        len(rows) - len(result.failures),
        len(result.failures),
    )
    return result


def sweep_records(
    method: Method,
    alphas: Sequence[float],
    n_min: float,
    n_max: float,
    settings: SolverSettings,
    *,
    points_per_decade: int = 16,
    integer_n_policy: IntegerNPolicy = "exact_reals",
    workers: int = 1,
) -> SweepResult:
    """Build a plan and run it."""
    plan = SweepPlan(
        n_min=n_min,
        n_max=n_max,
        alphas=tuple(alphas),
        method=method,
        settings=settings,
        points_per_decade=points_per_decade,
        integer_n_policy=integer_n_policy,
    )
    return run_sweep(plan, workers)


__all__ = [
    "ALLOWED_N_POLICIES",
    "IntegerNPolicy",
    "SolverSettings",
    "SweepPlan",
    "SweepResult",
    "compute_gap",
    "discrete_size",
    "evaluate_cell",
    "iter_sweep",
    "run_sweep",
    "sweep_records",
]
