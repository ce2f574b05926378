"""Command-line interface for tunnelgap."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any, Sequence

from tunnelgap.config import apply_overrides, load_config
from tunnelgap.errors import (
    ConfigError,
    EmptyBinError,
    InputDataError,
    RegimeError,
    SolverError,
    UserInputError,
    exit_code_for,
    format_error,
)
from tunnelgap.logging_utils import setup_logging
from tunnelgap.records import ALLOWED_METHODS

if TYPE_CHECKING:
    from tunnelgap.analysis import ScalingSeries

DEFAULT_CONFIG_PATH = Path("config") / "tunnelgap.conf"
DEFAULT_RANGE_STEP = 0.01
N_POLICIES = ("exact_reals", "round_to_integer", "barrier_width_transitions")
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7")
KNOWN_ERRORS = (ConfigError, UserInputError, SolverError, InputDataError, RegimeError)

logger = logging.getLogger(__name__)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the tunnelgap CLI entrypoint; returns the process exit code."""
    parser = _build_parser()
    try:
        cleaned_argv, config_path = _extract_config_arg(argv)
        try:
            args = parser.parse_args(cleaned_argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        args.config = config_path

        config = load_config(
            config_path or str(DEFAULT_CONFIG_PATH), required=config_path is not None
        )
        config = apply_overrides(config, _collect_overrides(args))
        setup_logging(config)
        logger.debug("Loaded config from %s", config_path or DEFAULT_CONFIG_PATH)

        handler = _HANDLERS[args.command]
        return handler(args, config)
    except KNOWN_ERRORS as exc:
        print(format_error(exc), file=sys.stderr)
        return exit_code_for(exc)
    except Exception as exc:
        print(format_error(exc), file=sys.stderr)
        return 1


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number: {text!r}")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _alpha_list(text: str) -> tuple[float, ...]:
    """Comma-separated alphas; ``lo..hi`` or ``lo..hi:step`` expands to a range."""
    values: list[float] = []
    for item in (part.strip() for part in text.split(",")):
        if not item:
            continue
        try:
            if ".." not in item:
                values.append(float(item))
                continue
            bounds, _, step_text = item.partition(":")
            lo_text, hi_text = bounds.split("..", 1)
            lo, hi = float(lo_text), float(hi_text)
            step = float(step_text) if step_text else DEFAULT_RANGE_STEP
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad alpha list: {text!r}") from exc
        if step <= 0 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad alpha range: {item!r}")
        count = int(math.floor((hi - lo) / step + 1e-6))
        values.extend(round(lo + k * step, 10) for k in range(count + 1))
    if not values:
        raise argparse.ArgumentTypeError("alpha list is empty")
    return tuple(values)


def _bin_list(text: str) -> list[tuple[float, float]]:
    bins = []
    for item in (part.strip() for part in text.split(",")):
        if not item:
            continue
        try:
            lo_text, hi_text = item.split(":", 1)
            bins.append((float(lo_text), float(hi_text)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bins must look like 1e2:1e3,1e3:1e4: {text!r}") from exc
    return bins


def _build_parser() -> argparse.ArgumentParser:
    common_parser = argparse.ArgumentParser(add_help=False)
    _add_common_options(common_parser)

    parser = argparse.ArgumentParser(
        prog="tunnelgap",
        description="Minimum spectral gaps of barrier-tunneling annealing problems.",
        parents=[common_parser],
    )
    parser.add_argument(
        "--config",
        default=None,
        help=f"Path to config file (default: {DEFAULT_CONFIG_PATH}, optional).",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    gap_parser = subparsers.add_parser(
        "gap", help="Minimum gap for one (n, alpha, method).", parents=[common_parser]
    )
    gap_parser.add_argument("--method", required=True, choices=ALLOWED_METHODS)
    gap_parser.add_argument("--alpha", required=True, type=float)
    gap_parser.add_argument("--n", required=True, type=_positive_float)

    sweep_parser = subparsers.add_parser(
        "sweep", help="Gaps over an (alpha, n) grid.", parents=[common_parser]
    )
    sweep_parser.add_argument("--method", required=True, choices=ALLOWED_METHODS)
    _add_alpha_options(sweep_parser, required=True)
    sweep_parser.add_argument("--nmin", required=True, type=_positive_float)
    sweep_parser.add_argument("--nmax", required=True, type=_positive_float)
    sweep_parser.add_argument(
        "--policy",
        choices=N_POLICIES,
        default=None,
        help="Integer-n policy (default: exact_reals, round_to_integer for discrete).",
    )

    fit_parser = subparsers.add_parser(
        "fit", help="Binned scaling fits of a gap series file.", parents=[common_parser]
    )
    fit_parser.add_argument("input_path", help="CSV with n and gap or log_gap columns.")
    fit_parser.add_argument("--bins", type=_bin_list, default=None, help="e.g. 1e2:1e3,1e3:1e4")
    fit_parser.add_argument("--model", choices=("power", "exponential"), default="power")
    _add_series_filters(fit_parser)

    ratio_parser = subparsers.add_parser(
        "ratio", help="Derivative ratio R = f''/f' of a gap series file.", parents=[common_parser]
    )
    ratio_parser.add_argument("input_path", help="CSV uniform in ln n.")
    ratio_parser.add_argument(
        "--target", action="store_true", help="Also print the large-n limit of R."
    )
    _add_series_filters(ratio_parser)

    threshold_parser = subparsers.add_parser(
        "threshold",
        help="n where continuous/asymptotic gap reaches each level v.",
        parents=[common_parser],
    )
    threshold_parser.add_argument("--alpha", required=True, type=float)
    threshold_parser.add_argument("--v", required=True, type=_float_list)
    threshold_parser.add_argument("--nmin", type=_positive_float, default=None)
    threshold_parser.add_argument("--nmax", type=_positive_float, default=None)

    reproduce_parser = subparsers.add_parser(
        "reproduce", help="Write a figure dataset and its manifest.", parents=[common_parser]
    )
    reproduce_parser.add_argument("figure", nargs="?", choices=FIGURES, default=None)
    reproduce_parser.add_argument("--figure", dest="figure_flag", choices=FIGURES, default=None)
    _add_alpha_options(reproduce_parser, required=False)
    reproduce_parser.add_argument("--nmin", type=_positive_float, default=None)
    reproduce_parser.add_argument("--nmax", type=_positive_float, default=None)
    reproduce_parser.add_argument("--discrete-nmax", type=_positive_float, default=None)
    reproduce_parser.add_argument("--v", type=_float_list, default=None)

    return parser


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    suppress = argparse.SUPPRESS
    parser.add_argument("--omega", type=_positive_float, default=suppress, help="Well frequency (default 4/3).")
    parser.add_argument("--c", type=_positive_float, default=suppress, help="Energy scale (default 8/(3(sqrt(3)-1))).")
    parser.add_argument("--digits", type=int, default=suppress, help="Working precision in decimal digits.")
    parser.add_argument("--barrier", choices=("square", "binomial"), default=suppress)
    parser.add_argument("--height-coeff", type=_positive_float, default=suppress)
    parser.add_argument("--width-coeff", type=_positive_float, default=suppress)
    parser.add_argument("--points-per-decade", type=int, default=suppress)
    parser.add_argument("--workers", type=int, default=suppress, help="Worker processes for sweeps.")
    parser.add_argument("--output", choices=("csv", "json"), default=suppress, help="Output format.")
    parser.add_argument("--out", default=suppress, help="Output file (directory for reproduce).")
    parser.add_argument("--log-level", default=suppress, help="DEBUG, INFO, WARNING, ...")


def _add_alpha_options(parser: argparse.ArgumentParser, *, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--alpha", type=float, default=None)
    group.add_argument("--alphas", type=_alpha_list, default=None, help="e.g. 0.26,0.3 or 0.26..0.32")


def _add_series_filters(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=None, help="Use rows with this alpha.")
    parser.add_argument("--method", choices=ALLOWED_METHODS, default=None)


_OVERRIDE_KEYS = {
    "omega": ("model", "omega"),
    "c": ("model", "c"),
    "digits": ("precision", "digits"),
    "barrier": ("discrete", "barrier"),
    "height_coeff": ("discrete", "height_coeff"),
    "width_coeff": ("discrete", "width_coeff"),
    "points_per_decade": ("sweep", "points_per_decade"),
    "workers": ("sweep", "workers"),
    "output": ("output", "format"),
    "log_level": ("logging", "level"),
}


def _collect_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for attribute, (section, key) in _OVERRIDE_KEYS.items():
        value = getattr(args, attribute, None)
        if value is None:
            continue
        if attribute == "log_level":
            value = str(value).upper()
        overrides.setdefault(section, {})[key] = value
    return overrides


def _extract_config_arg(argv: Sequence[str] | None) -> tuple[list[str], str | None]:
    """Allow --config to appear before or after subcommands."""
    if argv is None:
        argv_list = list(sys.argv[1:])
    else:
        argv_list = list(argv)

    config_path: str | None = None
    cleaned: list[str] = []
    index = 0

    while index < len(argv_list):
        value = argv_list[index]
        if value == "--config":
            if index + 1 >= len(argv_list):
                raise UserInputError("Missing value for --config.")
            config_path = argv_list[index + 1]
            if not config_path:
                raise UserInputError("Config path cannot be empty.")
            index += 2
            continue
        if value.startswith("--config="):
            config_path = value.split("=", 1)[1]
            if not config_path:
                raise UserInputError("Config path cannot be empty.")
            index += 1
            continue

        cleaned.append(value)
        index += 1

    return cleaned, config_path


def _alphas(args: argparse.Namespace) -> tuple[float, ...] | None:
    if getattr(args, "alphas", None) is not None:
        return tuple(args.alphas)
    if getattr(args, "alpha", None) is not None:
        return (args.alpha,)
    return None


def _emit(text: str, args: argparse.Namespace) -> None:
    from tunnelgap.output import write_text

    out = getattr(args, "out", None)
    if out:
        write_text(text, out)
        logger.info("Wrote %s", out)
    else:
        sys.stdout.write(text)


def _handle_gap(args: argparse.Namespace, config: dict[str, Any]) -> int:
    from tunnelgap.output import render_records
    from tunnelgap.sweep import SolverSettings, compute_gap

    record = compute_gap(args.method, args.n, args.alpha, SolverSettings.from_config(config))
    _emit(render_records([record], config["output"]["format"]), args)
    return 0


def _handle_sweep(args: argparse.Namespace, config: dict[str, Any]) -> int:
    from tunnelgap.output import record_writer, render_records
    from tunnelgap.sweep import SolverSettings, SweepPlan, run_sweep

    policy = args.policy or ("round_to_integer" if args.method == "discrete" else "exact_reals")
    plan = SweepPlan(
        n_min=args.nmin,
        n_max=args.nmax,
        alphas=_alphas(args) or (),
        method=args.method,
        settings=SolverSettings.from_config(config),
        points_per_decade=config["sweep"]["points_per_decade"],
        integer_n_policy=policy,
    )
    workers = config["sweep"]["workers"]
    if config["output"]["format"] != "csv":
        result = run_sweep(plan, workers=workers)
        _emit(render_records(result.rows, config["output"]["format"]), args)
        return result.exit_code

    out = getattr(args, "out", None)
    if not out:
        return run_sweep(plan, workers=workers, on_row=record_writer(sys.stdout)).exit_code
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8", newline="") as handle:
        result = run_sweep(plan, workers=workers, on_row=record_writer(handle))
    logger.info("Wrote %s", out)
    return result.exit_code


def _load_series(args: argparse.Namespace) -> ScalingSeries:
    from tunnelgap.analysis import ScalingSeries, SeriesPoint
    from tunnelgap.output import read_series_csv

    def number(raw: str | None) -> float | None:
        if raw is None or raw.strip() == "":
            return None
        try:
            return float(raw)
        except ValueError as exc:
            raise InputDataError(f"{args.input_path}: not a number: {raw!r}") from exc

    groups: dict[tuple[float | None, str | None], list[SeriesPoint]] = {}
    for row in read_series_csv(args.input_path):
        if (row.get("error") or "").strip():
            continue
        alpha = number(row.get("alpha"))
        method = (row.get("method") or "").strip() or None
        if args.alpha is not None and (alpha is None or not math.isclose(alpha, args.alpha)):
            continue
        if args.method is not None and method != args.method:
            continue
        n = number(row["n"])
        if n is None:
            raise InputDataError(f"{args.input_path}: row without n.")
        point = SeriesPoint(n=n, gap=number(row.get("gap")), log_gap=number(row.get("log_gap")))
        groups.setdefault((alpha, method), []).append(point)

    if not groups:
        raise InputDataError(f"{args.input_path}: no usable rows.")
    if len(groups) > 1:
        raise InputDataError(
            f"{args.input_path}: holds {len(groups)} series; select one with --alpha/--method."
        )
    (alpha, method), points = next(iter(groups.items()))
    points.sort(key=lambda point: point.n)
    return ScalingSeries(tuple(points), alpha=alpha, method=method)


def _handle_fit(args: argparse.Namespace, config: dict[str, Any]) -> int:
    from tunnelgap.analysis import binned_power_fits, decade_bins, exponential_fit
    from tunnelgap.output import render_fits

    series = _load_series(args)
    bins = args.bins or decade_bins(series.points[0].n, series.points[-1].n)
    if args.model == "power":
        fits = binned_power_fits(series, bins)
    else:
        subsets = [series.restrict(lo, hi) for lo, hi in bins]
        empty = [b for b, subset in zip(bins, subsets) if len(subset) < 2]
        if empty:
            raise EmptyBinError(empty)
        fits = [exponential_fit(subset) for subset in subsets]
    _emit(render_fits(fits, config["output"]["format"]), args)
    return 0


def _handle_ratio(args: argparse.Namespace, config: dict[str, Any]) -> int:
    from tunnelgap.analysis import derivative_ratio
    from tunnelgap.asymptotic import target_ratio
    from tunnelgap.output import RATIO_COLUMNS, render_table

    series = _load_series(args)
    report = derivative_ratio(series)
    if not args.target:
        rows = [[point.n, point.R] for point in report.points]
        _emit(render_table(RATIO_COLUMNS, rows, config["output"]["format"]), args)
        return 0
    alpha = args.alpha if args.alpha is not None else series.alpha
    if alpha is None:
        raise UserInputError("--target needs --alpha or an alpha column in the input.")
    target = target_ratio(alpha)
    rows = [[point.n, point.R, target] for point in report.points]
    _emit(render_table((*RATIO_COLUMNS, "target"), rows, config["output"]["format"]), args)
    return 0


def _handle_threshold(args: argparse.Namespace, config: dict[str, Any]) -> int:
    from tunnelgap.output import render_table
    from tunnelgap.reproduce import threshold_for
    from tunnelgap.sweep import SolverSettings

    settings = SolverSettings.from_config(config)
    rows = []
    for v in args.v:
        crossing, estimate = threshold_for(args.alpha, v, settings, n_lo=args.nmin, n_hi=args.nmax)
        rows.append([args.alpha, v, crossing, estimate])
    columns = ("alpha", "v", "n", "estimate")
    _emit(render_table(columns, rows, config["output"]["format"]), args)
    return 0


def _handle_reproduce(args: argparse.Namespace, config: dict[str, Any]) -> int:
    from tunnelgap.reproduce import reproduce, resolve_request

    figure = args.figure_flag or args.figure
    if figure is None:
        raise UserInputError("reproduce needs a figure (fig1 .. fig7).")
    overrides = {
        "alphas": _alphas(args),
        "n_min": args.nmin,
        "n_max": args.nmax,
        "discrete_n_max": args.discrete_nmax,
        "points_per_decade": getattr(args, "points_per_decade", None),
        "v_levels": args.v,
        "barrier": getattr(args, "barrier", None),
    }
    request = resolve_request(figure, overrides)
    out_dir = getattr(args, "out", None) or config["output"]["dir"]
    csv_path, manifest_path = reproduce(request, config, out_dir, config["sweep"]["workers"])
    print(csv_path)
    print(manifest_path)
    return 0


_HANDLERS = {
    "gap": _handle_gap,
    "sweep": _handle_sweep,
    "fit": _handle_fit,
    "ratio": _handle_ratio,
    "threshold": _handle_threshold,
    "reproduce": _handle_reproduce,
}


__all__ = ["main"]
