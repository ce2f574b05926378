"""Tests for (alpha, n) sweeps."""

from __future__ import annotations

import logging

import pytest

import tunnelgap.sweep as sweep
from tunnelgap.config import DEFAULT_CONFIG
from tunnelgap.continuous import DEFAULT_C, DEFAULT_OMEGA
from tunnelgap.discrete import width_transition_ns
from tunnelgap.errors import UserInputError
from tunnelgap.sweep import (
    SolverSettings,
    SweepPlan,
    compute_gap,
    discrete_size,
    evaluate_cell,
    run_sweep,
    sweep_records,
)

SETTINGS = SolverSettings(omega=DEFAULT_OMEGA, c=DEFAULT_C, s_grid=64)


def test_settings_from_config() -> None:
    settings = SolverSettings.from_config(DEFAULT_CONFIG)
    assert settings.omega == DEFAULT_OMEGA
    assert settings.digits == 30
    assert settings.s_grid == 512
    assert settings.precision().digits == 30
    spec = settings.barrier_spec(0.3)
    assert spec.shape == "square"
    assert spec.alpha == 0.3


def test_plan_cells_are_sorted_and_complete() -> None:
    plan = SweepPlan(1e2, 1e3, (0.32, 0.28), "asymptotic1", SETTINGS)
    cells = plan.cells()
    assert len(cells) == 2 * 17
    assert cells == sorted(cells)
    assert cells[0] == (0.28, 1e2)
    assert plan.omega == DEFAULT_OMEGA
    assert plan.c == DEFAULT_C
    assert plan.precision_digits == 30


def test_plan_validation() -> None:
    with pytest.raises(UserInputError, match="nmin < nmax"):
        SweepPlan(1e3, 1e2, (0.3,), "asymptotic1", SETTINGS)
    with pytest.raises(UserInputError, match="Unknown method"):
        SweepPlan(1e2, 1e3, (0.3,), "exact", SETTINGS)  # type: ignore[arg-type]
    with pytest.raises(UserInputError, match="at least one alpha"):
        SweepPlan(1e2, 1e3, (), "asymptotic1", SETTINGS)
    with pytest.raises(UserInputError, match="integer-n policy"):
        SweepPlan(10, 100, (0.3,), "discrete", SETTINGS)
    with pytest.raises(UserInputError, match="exceeds the cap"):
        SweepPlan(10, 3e6, (0.3,), "discrete", SETTINGS, integer_n_policy="round_to_integer")


def test_integer_policies() -> None:
    rounded = SweepPlan(10, 100, (0.3,), "discrete", SETTINGS, 16, "round_to_integer")
    values = rounded.n_values(0.3)
    assert all(value.is_integer() for value in values)
    assert values == sorted(set(values))
    assert values[0] == 10 and values[-1] == 100

    transitions = SweepPlan(2, 300, (0.3,), "discrete", SETTINGS, 16, "barrier_width_transitions")
    expected = width_transition_ns(2, 300, SETTINGS.barrier_spec(0.3))
    assert transitions.n_values(0.3) == [float(n) for n in expected]


def test_discrete_size() -> None:
    assert discrete_size(12.0, 100) == 12
    with pytest.raises(UserInputError, match="integer n"):
        discrete_size(1.5, 100)
    with pytest.raises(UserInputError, match="cap"):
        discrete_size(200, 100)


def test_compute_gap_dispatches_by_method() -> None:
    first = compute_gap("asymptotic1", 1e4, 0.3, SETTINGS)
    second = compute_gap("asymptotic2", 1e4, 0.3, SETTINGS)
    discrete = compute_gap("discrete", 20, 0.3, SETTINGS)
    assert first.method == "asymptotic1"
    assert second.gap < first.gap
    assert discrete.s_star is not None and discrete.gap > 0


def test_failed_cells_become_error_rows(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.INFO, logger="tunnelgap.sweep"):
        result = sweep_records("asymptotic1", (0.2, 0.3), 1e2, 1e3, SETTINGS, points_per_decade=4)
    assert len(result.rows) == 10
    assert len(result.failures) == 5
    assert len(result.records) == 5
    assert result.exit_code == 5
    failure = result.failures[0]
    assert failure.alpha == 0.2
    assert failure.error.startswith("Regime error: RegimeError:")
    assert "Sweep summary: 5 succeeded, 5 failed." in caplog.text

    row = evaluate_cell("discrete", 1.5, 0.3, SETTINGS)
    assert row.record is None
    assert row.exit_code == 2


def test_successful_sweep_has_zero_exit_code() -> None:
    result = sweep_records("asymptotic1", (0.3,), 1e2, 1e4, SETTINGS, points_per_decade=2)
    assert result.exit_code == 0
    assert [row.n for row in result.rows] == pytest.approx([1e2, 10**2.5, 1e3, 10**3.5, 1e4])
    gaps = [row.record.gap for row in result.rows]
    assert gaps == sorted(gaps, reverse=True)


def test_rows_reach_callback_before_later_cells_run(monkeypatch: pytest.MonkeyPatch) -> None:
    emitted = []
    emitted_at_start = []
    original = sweep.compute_gap

    def tracking(method, n, alpha, settings):
        emitted_at_start.append(len(emitted))
        return original(method, n, alpha, settings)

    monkeypatch.setattr(sweep, "compute_gap", tracking)
    plan = SweepPlan(1e2, 1e3, (0.3,), "asymptotic1", SETTINGS, points_per_decade=2)
    result = run_sweep(plan, on_row=emitted.append)
    assert emitted_at_start == [0, 1, 2]
    assert emitted == result.rows

def test_sweep_is_deterministic_and_independent_of_workers() -> None:
    plan = SweepPlan(1e3, 1e5, (0.3, 0.45), "asymptotic1", SETTINGS, points_per_decade=4)
    serial = run_sweep(plan)
    again = run_sweep(plan)
    pooled = run_sweep(plan, workers=2)
    assert serial.rows == again.rows
    assert serial.rows == pooled.rows


def test_discrete_sweep_rows() -> None:
    result = sweep_records(
        "discrete",
        (0.3,),
        10,
        40,
        SETTINGS,
        points_per_decade=8,
        integer_n_policy="round_to_integer",
    )
    assert result.exit_code == 0
    for row in result.rows:
        assert row.record.gap > 0
        assert 0 < row.record.s_star < 1
