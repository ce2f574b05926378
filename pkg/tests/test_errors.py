"""Tests for error formatting and exit codes."""

from __future__ import annotations

from tunnelgap.errors import (
    BoundaryError,
    ConfigError,
    EmptyBinError,
    NegativeGapError,
    NonUniformGridError,
    PrecisionCeilingError,
    RegimeError,
    UserInputError,
    exit_code_for,
    format_error,
)


def test_format_error_prefixes() -> None:
    assert format_error(ConfigError("bad")) == "Config error: ConfigError: bad"
    assert format_error(UserInputError("missing")) == "Input error: UserInputError: missing"
    assert (
        format_error(PrecisionCeilingError("too deep"))
        == "Solver error: PrecisionCeilingError: too deep"
    )
    assert (
        format_error(NonUniformGridError("uneven"))
        == "Data error: NonUniformGridError: uneven"
    )
    assert format_error(BoundaryError("edge")) == "Regime error: BoundaryError: edge"
    assert format_error(ValueError("nope")) == "Unexpected error: nope"


def test_format_error_collapses_whitespace() -> None:
    assert format_error(RegimeError("line one\n  line two")) == (
        "Regime error: RegimeError: line one line two"
    )
    assert format_error(NegativeGapError()) == "Solver error: NegativeGapError: NegativeGapError"


def test_exit_codes_follow_error_families() -> None:
    assert exit_code_for(ConfigError("x")) == 2
    assert exit_code_for(UserInputError("x")) == 2
    assert exit_code_for(NegativeGapError("x")) == 3
    assert exit_code_for(EmptyBinError([(1.0, 10.0)])) == 4
    assert exit_code_for(BoundaryError("x")) == 5
    assert exit_code_for(KeyError("x")) == 1


def test_empty_bin_error_lists_bins() -> None:
    error = EmptyBinError([(100.0, 1000.0), (1e5, 1e6)])
    assert error.bins == [(100.0, 1000.0), (1e5, 1e6)]
    assert str(error) == "Bins with fewer than 2 points: [100, 1000], [100000, 1e+06]"
