"""Demand/supply functions and junction coupling.

A junction resolves its fluxes in three moves: measure what each incoming
road can send (demand) and each outgoing road can absorb (supply), maximise
the common throughput subject to the distribution and priority constraints,
and restart the outgoing roads with a homogenized marker and an adapted
pressure coefficient built from the merge proportions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import (
    RoadState,
    ValidationError,
    critical_density,
    pow_gamma,
    root_gamma,
    velocity,
)


def max_flux(w, c, gamma):
    """Largest flux a state with marker w and coefficient c can carry.

    Attained at the critical density sigma; zero when w <= 0.
    """
    sigma = critical_density(w, c, gamma)
    return sigma * velocity(sigma, w, c, gamma)


def demand_ap(rho, w, c, gamma):
    """Demand: flux for rho <= sigma, capped at the maximal flux beyond.

    Not clamped at zero; for w <= 0 the demand is already <= 0 through the
    formula (sigma = 0).  Junction resolution applies the clamp once, so that
    demand + supply = flux + max_flux holds exactly here.
    """
    sigma = critical_density(w, c, gamma)
    q = rho * velocity(rho, w, c, gamma)
    qmax = sigma * velocity(sigma, w, c, gamma)
    return np.where(rho <= sigma, q, qmax)


def supply_ap(rho, w, c, gamma):
    """Supply: maximal flux for rho <= sigma, actual flux beyond.

    For w <= 0 the supply is forced to zero (sigma = 0 would otherwise leave
    the congested branch active with a negative flux).
    """
    sigma = critical_density(w, c, gamma)
    q = rho * velocity(rho, w, c, gamma)
    qmax = sigma * velocity(sigma, w, c, gamma)
    return np.where(np.asarray(w) <= 0, 0.0, np.where(rho <= sigma, qmax, q))


def demand_lwr(rho, v_max, rho_max):
    """Scalar-model demand for v(rho) = v_max * (1 - rho/rho_max).

    Delegates to the two-field demand with w = v_max, c = v_max/rho_max and a
    linear pressure, which reproduces the scalar arithmetic exactly.
    """
    return demand_ap(rho, v_max, v_max / rho_max, 1.0)


def supply_lwr(rho, v_max, rho_max):
    """Scalar-model supply; same reduction as :func:`demand_lwr`."""
    return supply_ap(rho, v_max, v_max / rho_max, 1.0)


def density_at_velocity(w_ref, c_ref, v_down, gamma):
    """Density of the intermediate state with marker w_ref matching v_down.

    Solves w_ref - c_ref * rho**gamma = v_down.  When the downstream velocity
    exceeds the marker no such density exists and the result is vacuum (0).
    """
    base = np.maximum(w_ref - v_down, 0.0) / c_ref
    return root_gamma(base, gamma)


def homogenized_marker(priorities, markers):
    """Merge proportions applied to the incoming markers: sum_i beta_i w_i."""
    b = np.asarray(priorities, dtype=float)
    w = np.asarray(markers, dtype=float)
    total = b.sum()
    if total <= 0:
        raise ValidationError("homogenized marker undefined: no inflow share is positive")
    return float(np.dot(b, w) / total)


def pressure_coefficient(c0, priorities, markers, gamma):
    """Adapted pressure coefficient for an outgoing road.

    c = c0 * (sum_i beta_i w_i) * (sum_i beta_i / w_i**(1/gamma))**gamma.

    Derived from matching, at the homogenized marker, the mixture of the
    incoming velocity laws; requires every participating marker positive.
    """
    b = np.asarray(priorities, dtype=float)
    w = np.asarray(markers, dtype=float)
    mask = b > 0
    if not mask.any():
        raise ValidationError("adapted coefficient undefined: no inflow share is positive")
    if np.any(w[mask] <= 0):
        raise ValidationError(
            f"adapted coefficient needs positive incoming markers, got {w.tolist()}")
    b = b / b.sum()
    w_bar = float(np.dot(b, w))
    mix = float(np.dot(b[mask], w[mask] ** (-1.0 / gamma)))
    return float(c0 * w_bar * pow_gamma(mix, gamma))


def boundary_state(q, w, c, gamma, side):
    """Invert the flux relation rho * (w - c*rho**gamma) = q for rho.

    side='outgoing_start' picks the free-flow root (rho <= sigma, so the
    first characteristic points into the road); side='incoming_end' picks the
    congested root (rho >= sigma).  q may not exceed the maximal flux of
    (w, c); values within a relative 1e-9 of it are clipped to the crest.
    """
    if side not in ("outgoing_start", "incoming_end"):
        raise ValidationError(f"unknown boundary side {side!r}")
    if q < 0:
        raise ValidationError(f"boundary flux must be >= 0, got {q!r}")
    if w <= 0:
        if q > 0:
            raise ValidationError(f"no state with marker {w!r} carries flux {q!r}")
        return 0.0
    sigma = float(critical_density(w, c, gamma))
    qmax = sigma * float(velocity(sigma, w, c, gamma))
    if q > qmax * (1 + 1e-9) + 1e-15:
        raise ValidationError(
            f"boundary flux {q!r} exceeds the maximal flux {qmax!r} of (w={w!r}, c={c!r})")
    q = min(q, qmax)
    if q == 0.0:
        return 0.0 if side == "outgoing_start" else float(root_gamma(w / c, gamma))
    if gamma == 1.0:
        # rho^2 - (w/c) rho + q/c = 0; the discriminant only dips below zero
        # by rounding when q ~ qmax.
        half = w / (2.0 * c)
        disc = max(half * half - q / c, 0.0)
        root = np.sqrt(disc)
        return half - root if side == "outgoing_start" else half + root

    def residual(rho):
        return rho * (w - c * rho ** gamma) - q

    # Brackets are sign-definite for q > 0: residual(0) = -q < 0 and
    # residual(sigma) = qmax - q >= 0.  The jam endpoint can round to a hair
    # above zero, so it gets stretched until its sign is beyond doubt.
    if side == "outgoing_start":
        lo, hi = 0.0, sigma
    else:
        lo, hi = sigma, float(root_gamma(w / c, gamma)) * (1.0 + 1e-9)
    return float(brentq(residual, lo, hi, xtol=1e-15, rtol=8.881784197001252e-16))


def junction_shares(junction) -> np.ndarray:
    """Per-outgoing merge proportions beta[j][i] over the incoming roads.

    beta[j][i] = alpha[j][i] * beta_i / sum_l alpha[j][l] * beta_l.  Rows of
    outgoing roads that receive no flow at all are NaN; they never get a
    homogenized state.
    """
    a = junction.distribution_matrix
    b = junction.priority_vector
    weighted = a * b[np.newaxis, :]
    denom = weighted.sum(axis=1)
    shares = np.full_like(weighted, np.nan)
    ok = denom > 0
    shares[ok] = weighted[ok] / denom[ok, np.newaxis]
    return shares


def maximize_junction_flux(junction, demands, supplies):
    """Largest feasible throughput compatible with the routing constraints.

    Fluxes are parametrised as q_i = z * beta_i on the incoming side, which
    pins the outgoing fluxes to q_j = z * sum_i alpha[j][i] beta_i.  The
    scale z is capped by every positive-priority demand and every reachable
    supply; the result is clamped at zero so stalled junctions stay closed.

    Returns (z, inflow, outflow).
    """
    a = junction.distribution_matrix
    b = junction.priority_vector
    d = np.asarray(demands, dtype=float)
    s = np.asarray(supplies, dtype=float)
    caps = []
    for i in range(len(b)):
        if b[i] > 0:
            caps.append(d[i] / b[i])
    through = a @ b
    for j in range(len(through)):
        if through[j] > 0:
            caps.append(s[j] / through[j])
    z = max(min(caps), 0.0) if caps else 0.0
    return z, z * b, z * through


@dataclass
class JunctionResolution:
    """Fluxes and restart data produced by one junction solve.

    markers[j]/coefficients[j] describe the homogenized state imposed at the
    entry of outgoing road j; NaN where no flow is routed there.
    """

    inflow: np.ndarray
    outflow: np.ndarray
    markers: np.ndarray
    coefficients: np.ndarray
    shares: np.ndarray


def resolve_junction(junction, incoming_states, outgoing_states,
                     markers, coefficients, gamma) -> JunctionResolution:
    """Compute junction fluxes given boundary states and restart labels.

    incoming_states / outgoing_states are the RoadStates of the cells
    touching the junction.  markers / coefficients are the current
    homogenized labels per outgoing road (already adapted where required);
    the supply of outgoing road j is evaluated on the density that matches
    the road's first-cell velocity under those labels.
    """
    markers = np.asarray(markers, dtype=float)
    coefficients = np.asarray(coefficients, dtype=float)
    demands = np.array([
        float(demand_ap(st.rho, st.w, st.c, gamma)) for st in incoming_states])
    supplies = np.empty(len(outgoing_states))
    for j, st in enumerate(outgoing_states):
        if st.w == markers[j] and st.c == coefficients[j]:
            # Matching labels make the velocity inversion the identity;
            # bypassing it keeps the road's own density bit for bit.
            rho_t = st.rho
        else:
            v_down = st.velocity(gamma)
            rho_t = float(density_at_velocity(markers[j], coefficients[j], v_down, gamma))
        supplies[j] = float(supply_ap(rho_t, markers[j], coefficients[j], gamma))
    _, inflow, outflow = maximize_junction_flux(junction, demands, supplies)
    return JunctionResolution(
        inflow=inflow,
        outflow=outflow,
        markers=markers.copy(),
        coefficients=coefficients.copy(),
        shares=junction_shares(junction),
    )
