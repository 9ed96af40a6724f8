"""Numerical reference for the mixed-traffic pressure law."""

import numpy as np
import pytest

from apnet import (
    ValidationError,
    build_table,
    eval_pstar,
    homogenized_marker,
    pressure_coefficient,
    tau,
)

BETA = (0.5, 0.5)
MARKERS = (4.5, 3.5)


def test_tau_frozen_endpoint():
    # at v = 0 the mixture occupies tau = sum beta_i c0/w_i = 16/63
    assert float(tau(0.0, BETA, MARKERS, 1.0, 1.0)) == pytest.approx(
        16.0 / 63.0, rel=1e-13)


def test_tau_increases_with_velocity():
    vs = np.linspace(0.0, 3.4, 200)
    ts = tau(vs, BETA, MARKERS, 1.0, 1.0)
    assert np.all(np.diff(ts) > 0)


def test_table_touchpoints():
    table = build_table(BETA, MARKERS, 1.0, 1.0)
    assert table.w_bar == 4.0
    # densest tabulated state: all velocities exhausted
    assert table.rho[0] == pytest.approx(63.0 / 16.0, rel=1e-12)
    assert float(eval_pstar(table, 63.0 / 16.0)) == pytest.approx(4.0, abs=1e-9)
    c_bar = pressure_coefficient(1.0, BETA, MARKERS, 1.0)
    assert c_bar == pytest.approx(64.0 / 63.0, rel=1e-13)
    # the closed form agrees exactly at the anchor density
    assert c_bar * 63.0 / 16.0 == pytest.approx(4.0, rel=1e-13)


def test_table_low_density_limit_is_marker_gap():
    # as rho -> 0 only the slowest inflow population survives, so the
    # exact pressure tends to w_bar - min(w), not to zero
    table = build_table(BETA, MARKERS, 1.0, 1.0)
    w_bar = homogenized_marker(BETA, MARKERS)
    assert table.p_star[-1] == pytest.approx(w_bar - min(MARKERS), abs=1e-5)
    assert table.rho[-1] < 1e-4


def test_degenerate_single_inflow_reduces_to_base_law():
    for beta in ((1.0, 0.0), (0.0, 1.0)):
        table = build_table(beta, MARKERS, 1.0, 1.0)
        ref = 1.0 * table.rho
        assert float(np.max(np.abs(table.p_star - ref))) <= 1e-9


def test_equal_markers_change_nothing():
    table = build_table(BETA, (3.0, 3.0), 1.0, 1.0)
    assert float(np.max(np.abs(table.p_star - table.rho))) <= 1e-9
    assert pressure_coefficient(1.0, BETA, (3.0, 3.0), 1.0) == pytest.approx(
        1.0, rel=1e-13)


def test_eval_pstar_rejects_out_of_range():
    table = build_table(BETA, MARKERS, 1.0, 1.0)
    with pytest.raises(ValidationError):
        eval_pstar(table, 5.0)
    with pytest.raises(ValidationError):
        eval_pstar(table, 0.0)


def test_table_requires_positive_participants():
    with pytest.raises(ValidationError):
        build_table((0.0, 0.0), MARKERS, 1.0, 1.0)
    with pytest.raises(ValidationError):
        build_table((0.5, 0.5), (2.0, -1.0), 1.0, 1.0)
    with pytest.raises(ValidationError):
        build_table(BETA, MARKERS, 1.0, 1.0, size=1)


def test_table_with_steeper_pressure_exponent():
    table = build_table(BETA, MARKERS, 1.0, 2.0)
    # p* still meets w_bar where all motion stops
    assert float(eval_pstar(table, table.rho[0])) == pytest.approx(4.0, abs=1e-9)
    # and the closed form matches there as well
    c_bar = pressure_coefficient(1.0, BETA, MARKERS, 2.0)
    assert c_bar * table.rho[0] ** 2 == pytest.approx(4.0, rel=1e-9)
