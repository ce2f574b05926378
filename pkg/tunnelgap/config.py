"""Configuration loading and validation for tunnelgap."""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any

from tunnelgap.continuous import DEFAULT_C, DEFAULT_OMEGA
from tunnelgap.discrete import ALLOWED_SHAPES
from tunnelgap.errors import ConfigError

ALLOWED_OUTPUT_FORMATS = {"csv", "json"}
ALLOWED_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}

DEFAULT_CONFIG: dict[str, Any] = {
    "model": {
        "omega": DEFAULT_OMEGA,
        "c": DEFAULT_C,
    },
    "precision": {
        "digits": 30,
        "max_terms": 10000,
        "max_digits": 4096,
    },
    "discrete": {
        "barrier": "square",
        "height_coeff": 1.0,
        "width_coeff": 1.0,
        "center_fraction": 0.25,
        "s_grid": 512,
        "rel_tol": 1e-14,
        "n_cap": 2000000,
    },
    "continuous": {
        "scan_points": 4096,
        "min_barrier_ratio": 4.0,
        "gap_rtol": 1e-6,
    },
    "sweep": {
        "points_per_decade": 16,
        "workers": 1,
    },
    "output": {
        "format": "csv",
        "dir": "./output",
    },
    "logging": {
        "level": "WARNING",
        "console": True,
        "file": "",
    },
}


def load_config(path: str, *, required: bool = True) -> dict[str, Any]:
    """Load and validate the config file at the provided path.

    ``*.json`` files hold a JSON object; anything else is read as
    ``section.key = value`` lines. With ``required=False`` a missing file
    yields the defaults.
    """
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        if not required:
            merged = copy.deepcopy(DEFAULT_CONFIG)
            _validate_config(merged)
            return merged
        raise ConfigError(f"Config file not found: {config_path}") from exc

    if config_path.suffix.lower() == ".json":
        try:
            raw_config = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config file is not valid JSON: {config_path}") from exc
        if not isinstance(raw_config, dict):
            raise ConfigError("Config file must contain a JSON object at the top level.")
    else:
        raw_config = parse_key_values(text, source=str(config_path))

    merged = _merge_dicts(DEFAULT_CONFIG, raw_config)
    _validate_config(merged)
    return merged


def parse_key_values(text: str, *, source: str = "<string>") -> dict[str, Any]:
    """Parse ``dotted.key = value`` lines into a nested dict.

    Values are JSON scalars when they parse as such and strings otherwise.
    """
    parsed: dict[str, Any] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value'.")
        key, raw_value = (part.strip() for part in line.split("=", 1))
        parts = key.split(".")
        if not all(parts):
            raise ConfigError(f"{source}:{number}: invalid key '{key}'.")
        node = parsed
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"{source}:{number}: key '{key}' conflicts with a value.")
            node = child
        node[parts[-1]] = _parse_scalar(raw_value)
    return parsed


def _parse_scalar(raw_value: str) -> Any:
    try:
        return json.loads(raw_value)
    except json.JSONDecodeError:
        return raw_value


def apply_overrides(
    config: dict[str, Any], overrides: dict[str, Any] | None
) -> dict[str, Any]:
    """Merge CLI overrides into an existing config dictionary."""
    if overrides is None:
        return copy.deepcopy(config)
    if not isinstance(overrides, dict):
        raise ConfigError("Overrides must be provided as a dictionary.")
    merged = _merge_dicts(config, overrides)
    _validate_config(merged)
    return merged


def _merge_dicts(defaults: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(defaults)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge_dicts(merged[key], value)
        else:
            merged[key] = value
    return merged


def _validate_config(config: dict[str, Any]) -> None:
    model = _require_dict(config, "model")
    _validate_float(model, "omega", min_value=0, exclusive=True)
    _validate_float(model, "c", min_value=0, exclusive=True)

    precision = _require_dict(config, "precision")
    _validate_int(precision, "digits", min_value=16)
    _validate_int(precision, "max_terms", min_value=1)
    _validate_int(precision, "max_digits", min_value=precision["digits"])

    discrete = _require_dict(config, "discrete")
    _validate_str(discrete, "barrier", allowed=set(ALLOWED_SHAPES))
    _validate_float(discrete, "height_coeff", min_value=0, exclusive=True)
    _validate_float(discrete, "width_coeff", min_value=0, exclusive=True)
    _validate_float(discrete, "center_fraction", min_value=0, exclusive=True)
    _validate_int(discrete, "s_grid", min_value=64)
    _validate_float(discrete, "rel_tol", min_value=0, exclusive=True)
    _validate_int(discrete, "n_cap", min_value=2)

    continuous = _require_dict(config, "continuous")
    _validate_int(continuous, "scan_points", min_value=2)
    _validate_float(continuous, "min_barrier_ratio", min_value=1)
    _validate_float(continuous, "gap_rtol", min_value=0, exclusive=True)

    sweep = _require_dict(config, "sweep")
    _validate_int(sweep, "points_per_decade", min_value=1)
    _validate_int(sweep, "workers", min_value=1)

    output = _require_dict(config, "output")
    _validate_str(output, "format", allowed=ALLOWED_OUTPUT_FORMATS)
    _validate_str(output, "dir")

    logging_config = _require_dict(config, "logging")
    _validate_str(logging_config, "level", allowed=ALLOWED_LOG_LEVELS)
    _validate_bool(logging_config, "console")
    _validate_optional_str(logging_config, "file")


def _require_dict(parent: dict[str, Any], key: str) -> dict[str, Any]:
    value = parent.get(key)
    if not isinstance(value, dict):
        raise ConfigError(f"Config key '{key}' must be an object.")
    return value


def _validate_str(
    parent: dict[str, Any],
    key: str,
    *,
    allowed: set[str] | None = None,
) -> None:
    value = parent.get(key)
    if not isinstance(value, str) or not value:
        raise ConfigError(f"Config key '{key}' must be a non-empty string.")
    if allowed is not None and value not in allowed:
        allowed_list = ", ".join(sorted(allowed))
        raise ConfigError(f"Config key '{key}' must be one of: {allowed_list}.")


def _validate_optional_str(parent: dict[str, Any], key: str) -> None:
    value = parent.get(key)
    if value is None:
        return
    if not isinstance(value, str):
        raise ConfigError(f"Config key '{key}' must be a string.")


def _validate_bool(parent: dict[str, Any], key: str) -> None:
    value = parent.get(key)
    if not isinstance(value, bool):
        raise ConfigError(f"Config key '{key}' must be a boolean.")


def _validate_int(
    parent: dict[str, Any], key: str, *, min_value: int | None = None
) -> None:
    value = parent.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"Config key '{key}' must be an integer.")
    if min_value is not None and value < min_value:
        raise ConfigError(f"Config key '{key}' must be >= {min_value}.")


def _validate_float(
    parent: dict[str, Any],
    key: str,
    *,
    min_value: float | None = None,
    exclusive: bool = False,
) -> None:
    value = parent.get(key)
    if isinstance(value, bool) or not isinstance(value, (float, int)):
        raise ConfigError(f"Config key '{key}' must be a number.")
    if min_value is None:
        return
    if exclusive and float(value) <= min_value:
        raise ConfigError(f"Config key '{key}' must be > {min_value}.")
    if float(value) < min_value:
        raise ConfigError(f"Config key '{key}' must be >= {min_value}.")


__all__ = ["DEFAULT_CONFIG", "apply_overrides", "load_config", "parse_key_values"]
