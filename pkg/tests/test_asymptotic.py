"""Tests for the closed-form asymptotic gap expressions."""

from __future__ import annotations

import math

import pytest
from mpmath import mp, mpf

from tunnelgap.asymptotic import (
    asymptotic_constants,
    classify_region,
    gap_first_order,
    gap_second_order,
    kappa,
    n_threshold_estimate,
    target_ratio,
)
from tunnelgap.continuous import DEFAULT_C, DEFAULT_OMEGA
from tunnelgap.errors import BoundaryError, NegativeGapError, RegimeError


@pytest.mark.parametrize(
    ("alpha", "region"),
    [(0.1, "constant"), (0.2499, "constant"), (0.3, "polynomial"), (0.34, "exponential"), (0.45, "exponential")],
)
def test_classify_region(alpha: float, region: str) -> None:
    assert classify_region(alpha) == region


def test_classify_region_rejects_boundaries_and_out_of_range() -> None:
    for alpha in (0.25, 1 / 3):
        with pytest.raises(BoundaryError, match="boundary"):
            classify_region(alpha)
    for alpha in (0.0, 0.5, -0.1):
        with pytest.raises(RegimeError, match=r"\(0, 1/2\)"):
            classify_region(alpha)


def test_kappa_values() -> None:
    assert 0.7125 <= kappa(4 / 3) <= 0.7135
    assert 0.8228 <= kappa(1.0) <= 0.8238
    assert kappa(4.0) / kappa(1.0) == pytest.approx(0.5, rel=1e-14)
    with mp.workdps(40):
        expected = 2 / mp.sqrt(mp.pi) * (mp.ln2 + 2 - mp.euler - 2 * mp.ln2)
    assert kappa(1.0) == pytest.approx(float(expected), rel=1e-14)
    with pytest.raises(RegimeError):
        kappa(0.0)


def test_asymptotic_constants() -> None:
    constants = asymptotic_constants(0.3)
    assert constants.region == "polynomial"
    assert constants.kappa == pytest.approx(kappa())
    prefactor = 8 * math.sqrt(DEFAULT_OMEGA) / (DEFAULT_C * math.sqrt(math.pi))
    assert constants.second_order_coeff == pytest.approx(constants.kappa * prefactor, rel=1e-13)


def test_first_order_polynomial_values() -> None:
    record = gap_first_order(2.0, 0.3)
    expected = 8 * math.sqrt(4 / 3) / (DEFAULT_C * math.sqrt(math.pi))
    assert record.method == "asymptotic1"
    assert record.gap == pytest.approx(expected, rel=1e-14)
    assert record.gap == pytest.approx(1.4307, abs=1e-4)

    for alpha in (0.26, 0.3, 0.32):
        factor = 2.0 ** (1 / (2 * alpha - 0.5))
        base = gap_first_order(1e4, alpha)
        scaled = gap_first_order(1e4 * factor, alpha)
        assert scaled.gap == pytest.approx(base.gap / 2, rel=1e-12)


def test_first_order_exponential_is_formed_in_log_space() -> None:
    record = gap_first_order(1e25, 0.45)
    assert record.gap is None
    with mp.workdps(40):
        omega, c = mpf(4) / 3, mpf(DEFAULT_C)
        eps = mpf(2) / mpf("1e25")
        expected = (
            mp.log(16 * omega / (c * mp.sqrt(mp.pi)))
            + mpf("0.225") * mp.log(eps)
            - mp.sqrt(omega) * eps ** (mpf("0.5") - mpf("1.5") * mpf("0.45"))
        )
    assert record.log_gap == pytest.approx(float(expected), rel=1e-12)
    assert record.f == record.log_gap

    moderate = gap_first_order(1e4, 0.4)
    assert moderate.gap == pytest.approx(math.exp(moderate.log_gap))


def test_first_order_rejects_constant_region() -> None:
    with pytest.raises(RegimeError, match="constant region"):
        gap_first_order(1e4, 0.2)


@pytest.mark.parametrize("alpha", [0.26, 0.28, 0.3, 0.32])
@pytest.mark.parametrize("n", [1e3, 1e6, 1e9, 1e14])
def test_second_order_ratio_identity(alpha: float, n: float) -> None:
    first = gap_first_order(n, alpha)
    second = gap_second_order(n, alpha)
    ratio = math.exp(second.f - first.f)
    assert ratio == pytest.approx(1 - kappa() * (2 / n) ** (2 * alpha - 0.5), abs=1e-12)
    assert second.method == "asymptotic2"
    assert second.gap < first.gap


def test_second_order_errors() -> None:
    with pytest.raises(NegativeGapError, match="non-positive"):
        gap_second_order(1e-3, 0.3)
    with pytest.raises(RegimeError, match="exponential region"):
        gap_second_order(1e4, 0.4)


def test_threshold_estimate() -> None:
    estimate = n_threshold_estimate(0.9, 0.3)
    assert estimate == pytest.approx(2 * (kappa() / 0.1) ** 10, rel=1e-12)
    assert 6.7e8 < estimate < 6.9e8
    assert n_threshold_estimate(1 - kappa(), 0.3) == pytest.approx(2.0, rel=1e-9)

    levels = [n_threshold_estimate(v, 0.3) for v in (0.5, 0.8, 0.9, 0.95)]
    assert levels == sorted(levels)

    with pytest.raises(RegimeError, match=r"\(0, 1\)"):
        n_threshold_estimate(1.0, 0.3)
    with pytest.raises(RegimeError):
        n_threshold_estimate(0.5, 0.4)


def test_target_ratio() -> None:
    assert target_ratio(0.45) == pytest.approx(0.175)
    assert target_ratio(0.36) == pytest.approx(0.04)
    assert target_ratio(0.3) == 0.0
