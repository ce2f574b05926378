"""Tests for gap records."""

from __future__ import annotations

import math

import pytest

from tunnelgap.records import MIN_LOG_DOUBLE, GapRecord, gap_from_log


def test_gap_record_validation() -> None:
    with pytest.raises(ValueError, match="Unknown method"):
        GapRecord(n=10, alpha=0.3, method="exact", gap=1.0)  # type: ignore[arg-type]
    with pytest.raises(ValueError, match="needs gap or log_gap"):
        GapRecord(n=10, alpha=0.3, method="continuous", gap=None)
    with pytest.raises(ValueError, match="positive"):
        GapRecord(n=10, alpha=0.3, method="asymptotic1", gap=0.0)
    with pytest.raises(ValueError, match="s_star"):
        GapRecord(n=10, alpha=0.3, method="discrete", gap=0.5)
    with pytest.raises(ValueError, match="s_star"):
        GapRecord(n=10, alpha=0.3, method="continuous", gap=0.5, s_star=0.5)
    with pytest.raises(ValueError, match="digits_used"):
        GapRecord(n=10, alpha=0.3, method="asymptotic2", gap=0.5, digits_used=30)


def test_gap_record_prefers_log_gap() -> None:
    underflow = GapRecord(n=1e30, alpha=0.45, method="asymptotic1", gap=None, log_gap=-5000.0)
    assert underflow.f == -5000.0
    plain = GapRecord(n=10, alpha=0.3, method="discrete", gap=0.25, s_star=0.7)
    assert plain.f == pytest.approx(math.log(0.25))


def test_gap_from_log() -> None:
    assert gap_from_log(0.0) == 1.0
    assert gap_from_log(MIN_LOG_DOUBLE - 1) is None
    assert gap_from_log(-700.0) == pytest.approx(math.exp(-700.0))
