"""Tests for figure dataset pipelines."""

from __future__ import annotations

import copy
import csv
import json
from pathlib import Path

import pytest

from tunnelgap import cli, reproduce
from tunnelgap.config import DEFAULT_CONFIG
from tunnelgap.errors import SolverError, UserInputError
from tunnelgap.reproduce import (
    FIGURE_DEFAULTS,
    build_dataset,
    manifest_argv,
    resolve_request,
)


@pytest.fixture(autouse=True)
def _isolated_cwd(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.chdir(tmp_path)


def _write_config(tmp_path: Path) -> Path:
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps(
            {
                "discrete": {"s_grid": 64},
                "continuous": {"scan_points": 256},
                "logging": {"console": False},
            }
        ),
        encoding="utf-8",
    )
    return path


def test_resolve_request_defaults_and_overrides() -> None:
    request = resolve_request("fig4")
    assert request.alphas == (0.3,)
    assert request.n_max == FIGURE_DEFAULTS["fig4"]["n_max"]
    assert request.points_per_decade == 8

    custom = resolve_request("fig2", {"alphas": (0.28,), "n_max": 1e4, "n_min": None})
    assert custom.alphas == (0.28,)
    assert custom.n_max == 1e4
    assert custom.n_min == 1e3
    assert resolve_request("fig1").barrier == "binomial"


def test_resolve_request_errors() -> None:
    with pytest.raises(UserInputError, match="Unknown figure"):
        resolve_request("fig9")
    with pytest.raises(UserInputError, match="nmin < nmax"):
        resolve_request("fig3", {"n_min": 1e6, "n_max": 1e3})


def test_fig1_rows_hold_binned_exponents() -> None:
    config = copy.deepcopy(DEFAULT_CONFIG)
    config["discrete"]["s_grid"] = 64
    request = resolve_request("fig1", {"alphas": (0.3,), "n_min": 1e2, "n_max": 1e3})
    rows = build_dataset(request, config)
    assert [row[2] for row in rows] == ["bin 100-1000", "asymptotic"]
    assert rows[1] == (0.3, pytest.approx(0.1), "asymptotic")
    assert all(row[0] == 0.3 for row in rows)


def test_fig5_leaves_unresolved_thresholds_empty(monkeypatch: pytest.MonkeyPatch) -> None:
    def fake_threshold_for(alpha, v, settings, *, n_lo=None, n_hi=None):
        if v > 0.6:
            raise SolverError("no crossing")
        return 1234.0, 999.0

    monkeypatch.setattr(reproduce, "threshold_for", fake_threshold_for)
    request = resolve_request("fig5", {"alphas": (0.3,), "v_levels": (0.5, 0.9)})
    rows = build_dataset(request, DEFAULT_CONFIG)
    assert [row[2] for row in rows] == ["v=0.5", "estimate v=0.5", "v=0.9", "estimate v=0.9"]
    assert rows[0][1] == 1234.0
    assert rows[2][1] is None
    assert rows[3][1] == pytest.approx(6.79e8, rel=0.01)


def test_reproduce_is_deterministic_and_replayable(tmp_path: Path, capsys) -> None:
    config_path = _write_config(tmp_path)
    argv = [
        "reproduce",
        "fig1",
        "--alphas",
        "0.3",
        "--nmin",
        "100",
        "--nmax",
        "1000",
        "--config",
        str(config_path),
    ]
    assert cli.main([*argv, "--out", str(tmp_path / "first")]) == 0
    printed = capsys.readouterr().out.split()
    assert printed == [
        str(tmp_path / "first" / "fig1.csv"),
        str(tmp_path / "first" / "fig1.manifest.json"),
    ]
    assert cli.main([*argv, "--out", str(tmp_path / "second")]) == 0

    first = (tmp_path / "first" / "fig1.csv").read_bytes()
    assert first == (tmp_path / "second" / "fig1.csv").read_bytes()
    header, *body = list(csv.reader(first.decode("utf-8").splitlines()))
    assert header == ["x", "y", "series"]
    assert [row[2] for row in body] == ["bin 100-1000", "asymptotic"]

    manifest = json.loads((tmp_path / "first" / "fig1.manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "reproduce fig1"
    assert manifest["flags"]["barrier"] == "binomial"
    assert manifest["defaults"]["discrete"]["s_grid"] == 64

    replay = manifest_argv(manifest, str(config_path))
    assert cli.main([*replay, "--out", str(tmp_path / "replay")]) == 0
    assert (tmp_path / "replay" / "fig1.csv").read_bytes() == first


def test_reproduce_below_tunneling_regime_exits_with_regime_code(tmp_path: Path, capsys) -> None:
    config_path = _write_config(tmp_path)
    argv = ["reproduce", "fig6", "--alpha", "0.36", "--nmin", "10", "--nmax", "50"]
    assert cli.main([*argv, "--config", str(config_path), "--out", str(tmp_path / "out")]) == 5
    assert "Regime error" in capsys.readouterr().err
    assert not (tmp_path / "out" / "fig6.csv").exists()


@pytest.mark.slow
def test_fig3_small_scale(tmp_path: Path) -> None:
    config = copy.deepcopy(DEFAULT_CONFIG)
    config["discrete"]["s_grid"] = 64
    config["continuous"]["scan_points"] = 256
    request = resolve_request("fig3", {"n_min": 1e3, "n_max": 1e4, "points_per_decade": 1})
    rows = build_dataset(request, config)
    labels = sorted({row[2] for row in rows})
    assert labels == ["asymptotic1 alpha=0.3", "continuous alpha=0.3", "discrete alpha=0.3"]
    assert all(row[1] > 0 for row in rows)
