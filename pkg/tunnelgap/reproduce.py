"""Dataset pipelines behind ``tunnelgap reproduce``.

Each figure becomes a CSV of (x, y, series) rows plus a JSON manifest with
every parameter needed to re-run it. Defaults are desk scale; larger runs
need explicit flags.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Callable

from tunnelgap.analysis import (
    ScalingSeries,
    binned_power_fits,
    continuous_ratio,
    decade_bins,
    derivative_ratio,
    threshold_n_ratio,
)
from tunnelgap.asymptotic import n_threshold_estimate, target_ratio
from tunnelgap.continuous import min_tunneling_n
from tunnelgap.errors import (
    InputDataError,
    RegimeError,
    SolverError,
    UserInputError,
)
from tunnelgap.output import build_manifest, render_dataset, write_manifest, write_text
from tunnelgap.records import GapRecord, Method
from tunnelgap.sweep import IntegerNPolicy, SolverSettings, SweepResult, sweep_records

DatasetRow = tuple[float, "float | None", str]

ALLOWED_FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7")
POLYNOMIAL_ALPHAS = (0.26, 0.27, 0.28, 0.29, 0.3, 0.31, 0.32)
THRESHOLD_SPAN = 1e3

_FAILURE_FAMILIES: dict[int, type[Exception]] = {
    2: UserInputError,
    3: SolverError,
    4: InputDataError,
    5: RegimeError,
}

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FigureRequest:
    """Scale parameters of one figure run."""

    figure: str
    alphas: tuple[float, ...]
    n_min: float = 1e3
    n_max: float = 1e6
    discrete_n_max: float = 1e4
    points_per_decade: int = 8
    v_levels: tuple[float, ...] = (0.5, 0.8, 0.9)
    barrier: str = "square"


FIGURE_DEFAULTS: dict[str, dict[str, Any]] = {
    "fig1": {"alphas": POLYNOMIAL_ALPHAS, "n_min": 1e2, "n_max": 1e4, "barrier": "binomial"},
    "fig2": {"alphas": POLYNOMIAL_ALPHAS, "n_min": 1e3, "n_max": 1e6},
    "fig3": {"alphas": (0.3,), "n_min": 1e3, "n_max": 1e6},
    "fig4": {"alphas": (0.3,), "n_min": 1e3, "n_max": 1e13},
    "fig5": {"alphas": (0.28, 0.3, 0.32)},
    "fig6": {"alphas": (0.36, 0.4, 0.45), "n_min": 1e3, "n_max": 1e8},
    "fig7": {"alphas": (0.26, 0.28, 0.3, 0.32, 0.34), "n_min": 1e3, "n_max": 1e8},
}


def resolve_request(figure: str, overrides: dict[str, Any] | None = None) -> FigureRequest:
    """Figure defaults with any non-None overrides applied."""
    if figure not in ALLOWED_FIGURES:
        raise UserInputError(f"Unknown figure: {figure}. Choose one of {', '.join(ALLOWED_FIGURES)}.")
    values: dict[str, Any] = {"figure": figure, **FIGURE_DEFAULTS[figure]}
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    values["alphas"] = tuple(float(alpha) for alpha in values["alphas"])
    if "v_levels" in values:
        values["v_levels"] = tuple(float(v) for v in values["v_levels"])
    request = FigureRequest(**values)
    if not 0 < request.n_min < request.n_max:
        raise UserInputError(f"Need 0 < nmin < nmax, got {request.n_min:g} and {request.n_max:g}.")
    return request


def _checked(result: SweepResult) -> list[GapRecord]:
    failures = result.failures
    if failures:
        first = failures[0]
        family = _FAILURE_FAMILIES.get(first.exit_code, SolverError)
        raise family(
            f"{len(failures)} cell(s) failed; first at alpha={first.alpha:g}, "
            f"n={first.n:g}: {first.error}"
        )
    return result.records


def _series(
    request: FigureRequest,
    settings: SolverSettings,
    method: Method,
    alpha: float,
    workers: int,
    *,
    n_max: float | None = None,
    policy: IntegerNPolicy = "exact_reals",
) -> ScalingSeries:
    result = sweep_records(
        method,
        (alpha,),
        request.n_min,
        n_max if n_max is not None else request.n_max,
        settings,
        points_per_decade=request.points_per_decade,
        integer_n_policy=policy,
        workers=workers,
    )
    return ScalingSeries.from_records(_checked(result))


def _binned_exponents(
    request: FigureRequest, settings: SolverSettings, method: Method, workers: int
) -> list[DatasetRow]:
    bins = decade_bins(request.n_min, request.n_max)
    policy: IntegerNPolicy = "barrier_width_transitions" if method == "discrete" else "exact_reals"
    rows: list[DatasetRow] = []
    for alpha in request.alphas:
        series = _series(request, settings, method, alpha, workers, policy=policy)
        for (lo, hi), fit in zip(bins, binned_power_fits(series, bins)):
            rows.append((alpha, fit.p, f"bin {lo:g}-{hi:g}"))
        rows.append((alpha, 2 * alpha - 0.5, "asymptotic"))
    return rows


def _fig1(request: FigureRequest, settings: SolverSettings, workers: int) -> list[DatasetRow]:
    settings = replace(settings, barrier=request.barrier)
    return _binned_exponents(request, settings, "discrete", workers)


def _fig2(request: FigureRequest, settings: SolverSettings, workers: int) -> list[DatasetRow]:
    return _binned_exponents(request, settings, "continuous", workers)


def _gap_curves(
    request: FigureRequest,
    settings: SolverSettings,
    workers: int,
    methods: tuple[Method, ...],
) -> list[DatasetRow]:
    settings = replace(settings, barrier=request.barrier)
    rows: list[DatasetRow] = []
    for alpha in request.alphas:
        for method in methods:
            if method == "discrete":
                n_max = min(request.n_max, request.discrete_n_max, settings.n_cap)
                if n_max <= request.n_min:
                    logger.warning("Discrete series skipped: cap %g is below nmin.", n_max)
                    continue
                series = _series(
                    request, settings, method, alpha, workers, n_max=n_max, policy="round_to_integer"
                )
            else:
                series = _series(request, settings, method, alpha, workers)
            label = f"{method} alpha={alpha:g}"
            rows.extend((point.n, point.gap, label) for point in series.points)
    return rows


def _fig3(request: FigureRequest, settings: SolverSettings, workers: int) -> list[DatasetRow]:
    return _gap_curves(request, settings, workers, ("discrete", "continuous", "asymptotic1"))


def _fig4(request: FigureRequest, settings: SolverSettings, workers: int) -> list[DatasetRow]:
    return _gap_curves(
        request, settings, workers, ("discrete", "continuous", "asymptotic1", "asymptotic2")
    )


def threshold_for(
    alpha: float,
    v: float,
    settings: SolverSettings,
    *,
    n_lo: float | None = None,
    n_hi: float | None = None,
) -> tuple[float, float]:
    """(crossing n, closed-form estimate) for one level v.

    The default bracket spans three decades either side of the estimate,
    clipped below at the smallest n in the tunneling regime.
    """
    estimate = n_threshold_estimate(v, alpha, settings.omega, settings.precision())
    floor = min_tunneling_n(alpha, settings.min_barrier_ratio) * 1.01
    low = n_lo if n_lo is not None else max(estimate / THRESHOLD_SPAN, floor)
    high = n_hi if n_hi is not None else max(estimate, low) * THRESHOLD_SPAN
    ratio = continuous_ratio(
        alpha,
        settings.omega,
        settings.c,
        settings.precision(),
        max_digits=settings.max_digits,
        gap_rtol=settings.gap_rtol,
        scan_points=settings.scan_points,
        min_barrier_ratio=settings.min_barrier_ratio,
    )
    crossing = threshold_n_ratio(
        alpha, v, low, high, omega=settings.omega, c=settings.c, ratio=ratio
    )
    return crossing, estimate


def _fig5(request: FigureRequest, settings: SolverSettings, workers: int) -> list[DatasetRow]:
    rows: list[DatasetRow] = []
    for v in request.v_levels:
        for alpha in request.alphas:
            estimate = n_threshold_estimate(v, alpha, settings.omega, settings.precision())
            try:
                crossing: float | None = threshold_for(alpha, v, settings)[0]
            except SolverError as exc:
                logger.warning("No threshold for alpha=%s v=%s: %s", alpha, v, exc)
                crossing = None
            rows.append((alpha, crossing, f"v={v:g}"))
            rows.append((alpha, estimate, f"estimate v={v:g}"))
    return rows


def _ratio_curves(
    request: FigureRequest, settings: SolverSettings, workers: int
) -> list[DatasetRow]:
    rows: list[DatasetRow] = []
    for alpha in request.alphas:
        series = _series(request, settings, "continuous", alpha, workers)
        target = target_ratio(alpha)
        for point in derivative_ratio(series).points:
            rows.append((point.n, point.R, f"alpha={alpha:g}"))
            rows.append((point.n, target, f"target alpha={alpha:g}"))
    return rows


PIPELINES: dict[str, Callable[[FigureRequest, SolverSettings, int], list[DatasetRow]]] = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _ratio_curves,
    "fig7": _ratio_curves,
}


def build_dataset(
    request: FigureRequest, config: dict[str, Any], workers: int = 1
) -> list[DatasetRow]:
    """Rows of the figure's (x, y, series) dataset."""
    settings = SolverSettings.from_config(config)
    logger.info("Reproducing %s with %s", request.figure, request)
    return PIPELINES[request.figure](request, settings, workers)


def reproduce(
    request: FigureRequest, config: dict[str, Any], out_dir: str | Path, workers: int = 1
) -> tuple[Path, Path]:
    """Write ``<out_dir>/<figure>.csv`` and its manifest; return both paths."""
    rows = build_dataset(request, config, workers)
    directory = Path(out_dir)
    csv_path = directory / f"{request.figure}.csv"
    manifest_path = directory / f"{request.figure}.manifest.json"
    write_text(render_dataset(rows), csv_path)
    manifest = build_manifest(f"reproduce {request.figure}", asdict(request), config)
    write_manifest(manifest, manifest_path)
    logger.info("Wrote %d rows to %s", len(rows), csv_path)
    return csv_path, manifest_path


def manifest_argv(manifest: dict[str, Any], config_path: str | None = None) -> list[str]:
    """Command line that re-derives a manifest's dataset."""
    flags = manifest["flags"]

    def joined(values: list[float]) -> str:
        return ",".join(repr(float(value)) for value in values)

    argv = [
        "reproduce",
        flags["figure"],
        "--alphas",
        joined(flags["alphas"]),
        "--nmin",
        repr(float(flags["n_min"])),
        "--nmax",
        repr(float(flags["n_max"])),
        "--discrete-nmax",
        repr(float(flags["discrete_n_max"])),
        "--points-per-decade",
        str(flags["points_per_decade"]),
        "--v",
        joined(flags["v_levels"]),
        "--barrier",
        flags["barrier"],
    ]
    if config_path is not None:
        argv.extend(["--config", config_path])
    return argv


__all__ = [
    "ALLOWED_FIGURES",
    "FIGURE_DEFAULTS",
    "FigureRequest",
    "build_dataset",
    "manifest_argv",
    "reproduce",
    "resolve_request",
    "threshold_for",
]
