"""Demand/supply interfaces and the junction flux problem."""

import numpy as np
import pytest

from hypothesis import given, strategies as st

from apnet import (
    Junction,
    RoadState,
    ValidationError,
    boundary_state,
    critical_density,
    demand_ap,
    demand_lwr,
    density_at_velocity,
    flux,
    homogenized_marker,
    junction_shares,
    max_flux,
    maximize_junction_flux,
    pressure_coefficient,
    resolve_junction,
    supply_ap,
    supply_lwr,
)

MERGE = Junction(id="m", incoming=("a", "b"), outgoing=("c",),
                 distribution=((1.0, 1.0),), priorities=(0.5, 0.5))


def test_demand_supply_frozen_values():
    # sigma = 1 for (w, c) = (2, 1): crest flux 1
    assert demand_ap(0.5, 2.0, 1.0, 1.0) == 0.75
    assert demand_ap(1.5, 2.0, 1.0, 1.0) == 1.0
    assert supply_ap(0.5, 2.0, 1.0, 1.0) == 1.0
    assert supply_ap(1.5, 2.0, 1.0, 1.0) == 0.75
    assert max_flux(2.0, 1.0, 1.0) == 1.0


def test_supply_closes_for_stopped_markers():
    assert supply_ap(0.5, 0.0, 1.0, 1.0) == 0.0
    assert supply_ap(0.5, -1.0, 1.0, 1.0) == 0.0


@given(st.floats(0.01, 2.5), st.floats(0.5, 3.0), st.floats(0.5, 2.0),
       st.floats(1.0, 2.0))
def test_demand_supply_complementarity(rho, w, c, gamma):
    jam = (w / c) ** (1.0 / gamma)
    rho = min(rho, jam)
    d = float(demand_ap(rho, w, c, gamma))
    s = float(supply_ap(rho, w, c, gamma))
    q = float(flux(rho, w, c, gamma)[0])
    crest = float(max_flux(w, c, gamma))
    assert d + s == pytest.approx(q + crest, rel=1e-12, abs=1e-12)
    # the pure interface values skip clamping (the junction clamps instead),
    # so states at the jam edge may round a hair below zero
    assert -1e-12 <= d <= crest + 1e-15
    assert -1e-12 <= s <= crest + 1e-15


def test_lwr_demand_supply_match_ap_special_case():
    # V(rho) = v_max (1 - rho/rho_max) equals w - c rho at w=v_max, c=v_max/rho_max
    v_max, rho_max = 2.0, 2.0
    for rho in (0.2, 0.9, 1.0, 1.7):
        assert demand_lwr(rho, v_max, rho_max) == pytest.approx(
            float(demand_ap(rho, 2.0, 1.0, 1.0)), rel=1e-12)
        assert supply_lwr(rho, v_max, rho_max) == pytest.approx(
            float(supply_ap(rho, 2.0, 1.0, 1.0)), rel=1e-12)


def test_boundary_state_frozen_roots():
    assert boundary_state(0.75, 2.0, 1.0, 1.0, "outgoing_start") == pytest.approx(0.5)
    assert boundary_state(0.75, 2.0, 1.0, 1.0, "incoming_end") == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        boundary_state(1.1, 2.0, 1.0, 1.0, "outgoing_start")
    with pytest.raises(ValidationError):
        boundary_state(0.5, 2.0, 1.0, 1.0, "sideways")


def test_boundary_state_clips_to_crest():
    crest = float(max_flux(2.0, 1.0, 1.0))
    sigma = float(critical_density(2.0, 1.0, 1.0))
    near = crest * (1.0 - 1e-12)
    assert boundary_state(near, 2.0, 1.0, 1.0, "outgoing_start") == pytest.approx(sigma)
    assert boundary_state(near, 2.0, 1.0, 1.0, "incoming_end") == pytest.approx(sigma)


@given(st.floats(0.0, 1.0), st.floats(0.8, 3.0), st.floats(0.5, 2.0),
       st.floats(1.0, 2.0))
def test_boundary_state_inverts_the_flux(q_frac, w, c, gamma):
    crest = float(max_flux(w, c, gamma))
    q = q_frac * crest
    sigma = float(critical_density(w, c, gamma))
    free = float(boundary_state(q, w, c, gamma, "outgoing_start"))
    jammed = float(boundary_state(q, w, c, gamma, "incoming_end"))
    assert free <= sigma * (1 + 1e-9)
    assert jammed >= sigma * (1 - 1e-9)
    assert float(flux(free, w, c, gamma)[0]) == pytest.approx(q, abs=1e-9 * max(1.0, crest))
    assert float(flux(jammed, w, c, gamma)[0]) == pytest.approx(q, abs=1e-9 * max(1.0, crest))


def test_density_at_velocity_matches_downstream():
    assert density_at_velocity(2.0, 1.0, 1.0, 1.0) == pytest.approx(1.0)
    # faster downstream traffic than the marker allows: vacuum
    assert density_at_velocity(1.0, 1.0, 1.5, 1.0) == 0.0


def test_homogenized_marker_is_the_priority_mixture():
    assert homogenized_marker((0.5, 0.5), (4.5, 3.5)) == 4.0
    assert homogenized_marker((1.0, 0.0), (4.5, 3.5)) == 4.5


def test_pressure_coefficient_frozen_values():
    assert pressure_coefficient(1.0, (0.5, 0.5), (4.5, 3.5), 1.0) == pytest.approx(
        64.0 / 63.0, rel=1e-13)
    assert pressure_coefficient(1.0, (0.5, 0.5), (2.0, 1.5), 1.0) == pytest.approx(
        49.0 / 48.0, rel=1e-13)


def test_pressure_coefficient_degenerate_cases():
    # single-road mixing keeps the base law
    assert pressure_coefficient(1.3, (1.0, 0.0), (2.2, 0.7), 1.0) == pytest.approx(
        1.3, rel=1e-13)
    # equal markers mix to themselves
    assert pressure_coefficient(0.8, (0.3, 0.7), (1.9, 1.9), 2.0) == pytest.approx(
        0.8, rel=1e-13)
    with pytest.raises(ValidationError):
        pressure_coefficient(1.0, (0.5, 0.5), (2.0, -1.0), 1.0)


def test_junction_shares_merge():
    shares = junction_shares(MERGE)
    assert shares.tolist() == [[0.5, 0.5]]
    lopsided = Junction(id="m2", incoming=("a", "b"), outgoing=("c",),
                        distribution=((1.0, 1.0),), priorities=(0.25, 0.75))
    assert junction_shares(lopsided).tolist() == [[0.25, 0.75]]


def test_junction_shares_unreachable_outgoing_is_nan():
    j = Junction(id="s", incoming=("a",), outgoing=("b", "c"),
                 distribution=((1.0,), (0.0,)), priorities=(1.0,))
    shares = junction_shares(j)
    assert shares[0].tolist() == [1.0]
    assert np.isnan(shares[1][0])


def test_maximize_junction_flux_frozen_merge():
    z, inflow, outflow = maximize_junction_flux(MERGE, (0.64, 0.5), (0.75,))
    assert z == 0.75
    assert inflow.tolist() == [0.375, 0.375]
    assert outflow.tolist() == [0.75]


def test_maximize_junction_flux_demand_limited():
    z, inflow, outflow = maximize_junction_flux(MERGE, (0.2, 0.6), (5.0,))
    # the scarcer incoming share caps the common scale
    assert z == pytest.approx(0.4)
    assert inflow.tolist() == pytest.approx([0.2, 0.2])
    assert outflow.tolist() == pytest.approx([0.4])


def test_maximize_junction_flux_never_negative():
    z, inflow, outflow = maximize_junction_flux(MERGE, (0.0, 0.4), (0.75,))
    assert z == 0.0
    assert inflow.tolist() == [0.0, 0.0]


def test_maximize_junction_flux_random_feasibility_and_tightness():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        n = rng.integers(1, 4)
        m = rng.integers(1, 4)
        b = rng.dirichlet(np.ones(n))
        a = rng.dirichlet(np.ones(m), size=n).T  # columns sum to one
        j = Junction(id="r", incoming=tuple(f"i{k}" for k in range(n)),
                     outgoing=tuple(f"o{k}" for k in range(m)),
                     distribution=tuple(tuple(row) for row in a),
                     priorities=tuple(b))
        d = rng.uniform(0.0, 2.0, n)
        s = rng.uniform(0.0, 2.0, m)
        z, inflow, outflow = maximize_junction_flux(j, d, s)
        assert z >= 0.0
        assert np.all(inflow <= d + 1e-12)
        assert np.all(outflow <= s + 1e-12)
        assert np.sum(inflow) == pytest.approx(np.sum(outflow), rel=1e-12, abs=1e-12)
        # z is maximal: some constraint is tight (or z hit the zero clamp)
        slack = []
        for i in range(n):
            if b[i] > 0:
                slack.append(d[i] - inflow[i])
        through = a @ b
        for k in range(m):
            if through[k] > 0:
                slack.append(s[k] - outflow[k])
        assert z == 0.0 or min(slack) <= 1e-12 * max(1.0, z)


def test_resolve_junction_same_label_fast_path():
    # matching labels must evaluate the supply on the road's own density
    st_out = RoadState(0.3141592653589793, 2.0, 1.0)
    res = resolve_junction(
        MERGE,
        [RoadState(0.3, 2.0, 1.0), RoadState(0.3, 2.0, 1.0)],
        [st_out],
        np.array([2.0]), np.array([1.0]), 1.0)
    direct = float(supply_ap(st_out.rho, 2.0, 1.0, 1.0))
    z, _, outflow = maximize_junction_flux(
        MERGE, (float(demand_ap(0.3, 2.0, 1.0, 1.0)),) * 2, (direct,))
    assert res.outflow.tolist() == outflow.tolist()


def test_resolve_junction_balances_mass():
    res = resolve_junction(
        MERGE,
        [RoadState(0.4, 2.0, 1.0), RoadState(0.5, 1.5, 1.0)],
        [RoadState(0.3, 2.0, 1.0)],
        np.array([1.75]), np.array([49.0 / 48.0]), 1.0)
    assert res.inflow.sum() == pytest.approx(res.outflow.sum(), rel=1e-14)
    assert res.inflow.tolist() == pytest.approx([0.375, 0.375])
    assert res.outflow.tolist() == pytest.approx([0.75])
