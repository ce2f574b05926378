"""CSV and JSON emission for gap records, fits, ratio points and figure datasets."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence, TextIO

from tunnelgap.errors import InputDataError, UserInputError
from tunnelgap.records import GapRecord

ALLOWED_FORMATS = ("csv", "json")
RECORD_COLUMNS = ("n", "alpha", "method", "gap", "log_gap", "s_star", "digits_used", "error")
FIT_COLUMNS = ("model", "n_lo", "n_hi", "A", "p", "B", "C", "q", "residual", "at_boundary")
RATIO_COLUMNS = ("n", "R")
DATASET_COLUMNS = ("x", "y", "series")


@dataclass(frozen=True)
class RecordRow:
    """A sweep row: a record, or the cell key plus an error message."""

    n: float
    alpha: float
    method: str
    record: GapRecord | None = None
    error: str | None = None
    exit_code: int = 0


def format_value(value: Any) -> str:
    """Deterministic text for one CSV cell; None becomes an empty field."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isfinite(value) and value == int(value) and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    return str(value)


def record_values(row: RecordRow | GapRecord) -> list[Any]:
    if isinstance(row, GapRecord):
        row = RecordRow(row.n, row.alpha, row.method, record=row)
    record = row.record
    return [
        row.n,
        row.alpha,
        row.method,
        record.gap if record else None,
        record.log_gap if record else None,
        record.s_star if record else None,
        record.digits_used if record else None,
        row.error,
    ]


def fit_values(fit: Any) -> list[Any]:
    return [
        fit.model,
        fit.n_range[0],
        fit.n_range[1],
        fit.A,
        fit.p,
        fit.B,
        fit.C,
        fit.q,
        fit.residual,
        fit.at_boundary,
    ]


def render_table(
    columns: Sequence[str], rows: Iterable[Sequence[Any]], fmt: str = "csv"
) -> str:
    """CSV with a header row and ``\\n`` line endings, or a JSON list of objects."""
    if fmt == "json":
        objects = [dict(zip(columns, row)) for row in rows]
        return json.dumps(objects, indent=2) + "\n"
    if fmt != "csv":
        raise UserInputError(f"Output format must be one of: {', '.join(ALLOWED_FORMATS)}.")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def render_records(rows: Iterable[RecordRow | GapRecord], fmt: str = "csv") -> str:
    return render_table(RECORD_COLUMNS, [record_values(row) for row in rows], fmt)


def record_writer(handle: TextIO) -> Callable[[RecordRow | GapRecord], None]:
    """Write the record CSV header now and return a per-row writer that flushes.

    The bytes written match ``render_records`` for the same rows.
    """
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    handle.flush()

    def write(row: RecordRow | GapRecord) -> None:
        writer.writerow([format_value(value) for value in record_values(row)])
        handle.flush()

    return write


def render_fits(fits: Iterable[Any], fmt: str = "csv") -> str:
    return render_table(FIT_COLUMNS, [fit_values(fit) for fit in fits], fmt)


def render_ratios(points: Iterable[Any], fmt: str = "csv") -> str:
    return render_table(RATIO_COLUMNS, [[point.n, point.R] for point in points], fmt)


def render_dataset(rows: Iterable[Sequence[Any]]) -> str:
    return render_table(DATASET_COLUMNS, rows)


def write_text(text: str, path: str | Path) -> None:
    """Write text to the provided path, creating parent directories."""
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def software_versions() -> dict[str, str]:
    import mpmath
    import numba
    import numpy
    import scipy

    from tunnelgap import __version__

    return {
        "tunnelgap": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "numba": numba.__version__,
    }


def build_manifest(
    command: str, flags: dict[str, Any], defaults: dict[str, Any]
) -> dict[str, Any]:
    """Manifest with every parameter needed to re-derive a dataset."""
    return {
        "command": command,
        "flags": flags,
        "defaults": defaults,
        "versions": software_versions(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_manifest(manifest: dict[str, Any], path: str | Path) -> None:
    write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", path)


def read_series_csv(path: str | Path) -> list[dict[str, str]]:
    """Rows of a CSV file with an ``n`` column and ``gap`` or ``log_gap``."""
    input_path = Path(path)
    if not input_path.is_file():
        raise UserInputError(f"Input file not found: {input_path}")
    with input_path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        columns = set(reader.fieldnames or ())
        if "n" not in columns or not columns & {"gap", "log_gap"}:
            raise InputDataError(f"{input_path}: header needs 'n' and 'gap' or 'log_gap'.")
        return list(reader)


__all__ = [
    "ALLOWED_FORMATS",
    "DATASET_COLUMNS",
    "FIT_COLUMNS",
    "RATIO_COLUMNS",
    "RECORD_COLUMNS",
    "RecordRow",
    "build_manifest",
    "fit_values",
    "format_value",
    "read_series_csv",
    "record_values",
    "record_writer",
    "render_dataset",
    "render_fits",
    "render_ratios",
    "render_records",
    "render_table",
    "software_versions",
    "write_manifest",
    "write_text",
]
