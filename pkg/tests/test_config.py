"""Tests for config loading and validation."""

import copy
import json
from pathlib import Path

import pytest

from tunnelgap.config import DEFAULT_CONFIG, apply_overrides, load_config, parse_key_values
from tunnelgap.errors import ConfigError


def _override(
    base: dict[str, object], overrides: dict[str, object]
) -> dict[str, object]:
    return apply_overrides(copy.deepcopy(base), overrides)


def test_bool_values_are_rejected_for_numeric_fields() -> None:
    with pytest.raises(ConfigError, match="digits"):
        _override(DEFAULT_CONFIG, {"precision": {"digits": True}})

    with pytest.raises(ConfigError, match="omega"):
        _override(DEFAULT_CONFIG, {"model": {"omega": False}})


def test_nested_override_validation_rejects_bad_types() -> None:
    with pytest.raises(ConfigError, match="discrete"):
        _override(DEFAULT_CONFIG, {"discrete": "not-a-dict"})

    with pytest.raises(ConfigError, match="model"):
        _override(DEFAULT_CONFIG, {"model": []})


def test_precision_limits() -> None:
    with pytest.raises(ConfigError, match="'digits' must be >= 16"):
        _override(DEFAULT_CONFIG, {"precision": {"digits": 12}})
    with pytest.raises(ConfigError, match="max_digits"):
        _override(DEFAULT_CONFIG, {"precision": {"digits": 64, "max_digits": 32}})


def test_discrete_settings_are_validated() -> None:
    with pytest.raises(ConfigError, match="barrier"):
        _override(DEFAULT_CONFIG, {"discrete": {"barrier": "triangle"}})
    with pytest.raises(ConfigError, match="s_grid"):
        _override(DEFAULT_CONFIG, {"discrete": {"s_grid": 10}})
    with pytest.raises(ConfigError, match="width_coeff"):
        _override(DEFAULT_CONFIG, {"discrete": {"width_coeff": 0}})


def test_output_format_must_be_known() -> None:
    with pytest.raises(ConfigError, match="format"):
        _override(DEFAULT_CONFIG, {"output": {"format": "xlsx"}})


def test_logging_console_must_be_bool() -> None:
    with pytest.raises(ConfigError, match="console"):
        _override(DEFAULT_CONFIG, {"logging": {"console": "yes"}})


def test_apply_overrides_keeps_base_untouched() -> None:
    base = copy.deepcopy(DEFAULT_CONFIG)
    merged = apply_overrides(base, {"model": {"omega": 1.0}})
    assert merged["model"]["omega"] == 1.0
    assert merged["model"]["c"] == DEFAULT_CONFIG["model"]["c"]
    assert base == DEFAULT_CONFIG
    assert apply_overrides(base, None) == base
    with pytest.raises(ConfigError, match="dictionary"):
        apply_overrides(base, ["model"])  # type: ignore[arg-type]


def test_load_config_json_applies_defaults(tmp_path: Path) -> None:
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"precision": {"digits": 40}}), encoding="utf-8")

    loaded = load_config(str(config_path))

    assert loaded["precision"]["digits"] == 40
    assert loaded["precision"]["max_terms"] == DEFAULT_CONFIG["precision"]["max_terms"]
    assert loaded["discrete"] == DEFAULT_CONFIG["discrete"]


def test_load_config_key_value_file(tmp_path: Path) -> None:
    config_path = tmp_path / "tunnelgap.conf"
    config_path.write_text(
        "# run settings\n"
        "model.omega = 1.0\n"
        "discrete.barrier = binomial\n"
        "logging.console = false\n"
        "output.format = \"json\"\n",
        encoding="utf-8",
    )

    loaded = load_config(str(config_path))

    assert loaded["model"]["omega"] == 1.0
    assert loaded["discrete"]["barrier"] == "binomial"
    assert loaded["logging"]["console"] is False
    assert loaded["output"]["format"] == "json"


def test_parse_key_values_errors() -> None:
    with pytest.raises(ConfigError, match="run.conf:2: expected 'key = value'"):
        parse_key_values("model.omega = 1\nnonsense\n", source="run.conf")
    with pytest.raises(ConfigError, match="invalid key"):
        parse_key_values("model..omega = 1")
    with pytest.raises(ConfigError, match="conflicts"):
        parse_key_values("model = 1\nmodel.omega = 2")


def test_load_config_missing_file(tmp_path: Path) -> None:
    missing = tmp_path / "absent.conf"
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(missing))
    assert load_config(str(missing), required=False) == DEFAULT_CONFIG


def test_load_config_rejects_bad_json(tmp_path: Path) -> None:
    config_path = tmp_path / "config.json"
    config_path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(str(config_path))

    config_path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON object"):
        load_config(str(config_path))
