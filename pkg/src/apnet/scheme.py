"""Time-stepping kernels on a single road.

Three update kernels share the demand/supply flux machinery: a plain Godunov
step for the three-field model, a transport-equilibrium (TE) step that
Glimm-samples contact discontinuities before the flux update so labels move
without smearing, and a scalar Godunov step for the first-order baseline.

Label handling is deliberately exact: wherever two states carry bitwise
identical (w, c) the intermediate-density computation short-circuits to the
downstream density itself.  This is an algebraic identity of the model, and
it keeps a run with uniform labels bit-compatible with the scalar model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    VACUUM_RHO,
    RoadState,
    ValidationError,
    flux,
    pow_gamma,
    velocity,
)
from .coupling import demand_ap, density_at_velocity, supply_ap


def van_der_corput(s: int) -> float:
    """Binary van der Corput value: bit-reverse s across the radix point.

    For s = sum_l i_l 2^l the value is sum_l i_l 2^(-(l+1)), always in (0, 1)
    for s >= 1.
    """
    if s < 1:
        raise ValidationError(f"sequence index must be >= 1, got {s!r}")
    value = 0.0
    scale = 0.5
    while s:
        if s & 1:
            value += scale
        scale *= 0.5
        s >>= 1
    return value


class CflViolationError(RuntimeError):
    """A step would exceed the stability bound (dt/dx) max|lambda| <= 1/2."""

    def __init__(self, ratio: float, cell: int | None = None, where: str = ""):
        place = f" on {where}" if where else ""
        at = f" (cell {cell})" if cell is not None else ""
        super().__init__(
            f"CFL violation{place}{at}: (dt/dx) max|lambda| = {ratio:.6g} > 0.5")
        self.ratio = ratio
        self.cell = cell
        self.where = where


@dataclass(frozen=True)
class CflCheck:
    ok: bool
    ratio: float
    cell: int | None


def check_cfl(dt, dx, rho, w, c, gamma) -> CflCheck:
    """Largest (dt/dx)|lambda| over the given cells; empty input passes."""
    if dt <= 0 or dx <= 0:
        raise ValidationError(f"dt and dx must be positive, got dt={dt!r}, dx={dx!r}")
    rho = np.asarray(rho, dtype=float)
    if rho.size == 0:
        return CflCheck(True, 0.0, None)
    v = velocity(rho, w, c, gamma)
    speed = np.maximum(np.abs(v - gamma * np.asarray(c) * pow_gamma(rho, gamma)),
                       np.abs(v))
    j = int(np.argmax(speed))
    ratio = (dt / dx) * float(speed[j])
    return CflCheck(ratio <= 0.5, ratio, j)


def _require_cfl(dt, dx, rho, w, c, gamma, where: str) -> None:
    res = check_cfl(dt, dx, rho, w, c, gamma)
    if not res.ok:
        raise CflViolationError(res.ratio, res.cell, where)


def godunov_flux(rho_l, w_l, c_l, rho_r, w_r, c_r, gamma):
    """Interface flux: min of left demand and supply at the matched density.

    The supply is evaluated on the density of the intermediate state carrying
    the left labels at the right velocity; with bitwise equal labels on both
    sides that density IS the right density, taken directly.  Upwinds (w, c)
    from the left.  Vectorized; returns shape (3,) or (3, n).
    """
    rho_l = np.asarray(rho_l, dtype=float)
    rho_r = np.asarray(rho_r, dtype=float)
    same = np.equal(w_l, w_r) & np.equal(c_l, c_r)
    v_r = velocity(rho_r, w_r, c_r, gamma)
    rho_t = np.where(same, rho_r, density_at_velocity(w_l, c_l, v_r, gamma))
    q = np.minimum(demand_ap(rho_l, w_l, c_l, gamma),
                   supply_ap(rho_t, w_l, c_l, gamma))
    return np.stack([q, w_l * q, c_l * q])


@dataclass
class GridRoad:
    """Discretised road state: cell averages of (rho, w, c) on a uniform grid."""

    dx: float
    gamma: float
    rho: np.ndarray
    w: np.ndarray
    c: np.ndarray

    def copy(self) -> "GridRoad":
        return GridRoad(self.dx, self.gamma,
                        self.rho.copy(), self.w.copy(), self.c.copy())

    def velocities(self) -> np.ndarray:
        return velocity(self.rho, self.w, self.c, self.gamma)

    def totals(self) -> np.ndarray:
        """Cell-integrated conserved quantities (mass, marker and coefficient loads)."""
        return self.dx * np.array([
            self.rho.sum(),
            (self.rho * self.w).sum(),
            (self.rho * self.c).sum(),
        ])


@dataclass(frozen=True)
class BoundaryData:
    """What a road end knows about the outside world for one step.

    ghost: reconstructed state beyond the boundary (required by the TE step,
    which samples against it); flux: imposed flux vector at the boundary
    interface (takes precedence in the Godunov step when present).
    """

    ghost: RoadState | None = None
    flux: np.ndarray | None = None


def _recover(m0, m1, m2, w_carry, c_carry):
    """Primitive fields from updated conserved cells, carrying labels in vacuum."""
    if np.any(m0 < -1e-12):
        raise ValidationError(
            f"update produced negative density {float(m0.min())!r}")
    m0 = np.maximum(m0, 0.0)
    occupied = m0 > VACUUM_RHO
    safe = np.where(occupied, m0, 1.0)
    w = np.where(occupied, m1 / safe, w_carry)
    c = np.where(occupied, m2 / safe, c_carry)
    return m0, w, c


def _interface_fluxes(road: GridRoad, rho, w, c,
                      left: BoundaryData, right: BoundaryData):
    """Godunov fluxes at all N+1 interfaces of a row of cells.

    Boundary interfaces use the ghost states; an imposed boundary flux
    overrides the corresponding column afterwards.
    """
    lg, rg = left.ghost, right.ghost
    if lg is None and left.flux is None:
        raise ValidationError("left boundary needs a ghost state or a flux")
    if rg is None and right.flux is None:
        raise ValidationError("right boundary needs a ghost state or a flux")
    # placeholder ghosts (copies of the edge cells) produce a self-flux that
    # is immediately overwritten by the imposed flux
    lrho, lw, lc = (rho[0], w[0], c[0]) if lg is None else (lg.rho, lg.w, lg.c)
    rrho, rw, rc = (rho[-1], w[-1], c[-1]) if rg is None else (rg.rho, rg.w, rg.c)
    rho_minus = np.concatenate(([lrho], rho))
    w_minus = np.concatenate(([lw], w))
    c_minus = np.concatenate(([lc], c))
    rho_plus = np.concatenate((rho, [rrho]))
    w_plus = np.concatenate((w, [rw]))
    c_plus = np.concatenate((c, [rc]))
    fluxes = godunov_flux(rho_minus, w_minus, c_minus,
                          rho_plus, w_plus, c_plus, road.gamma)
    if left.flux is not None:
        fluxes[:, 0] = left.flux
    if right.flux is not None:
        fluxes[:, -1] = right.flux
    return fluxes


def godunov_step(road: GridRoad, dt: float,
                 left: BoundaryData, right: BoundaryData) -> GridRoad:
    """One conservative Godunov step; aborts on a CFL violation."""
    _require_cfl(dt, road.dx, road.rho, road.w, road.c, road.gamma, "road")
    r = dt / road.dx
    fluxes = _interface_fluxes(road, road.rho, road.w, road.c, left, right)
    m0 = road.rho - r * (fluxes[0, 1:] - fluxes[0, :-1])
    m1 = road.rho * road.w - r * (fluxes[1, 1:] - fluxes[1, :-1])
    m2 = road.rho * road.c - r * (fluxes[2, 1:] - fluxes[2, :-1])
    rho, w, c = _recover(m0, m1, m2, road.w, road.c)
    return GridRoad(road.dx, road.gamma, rho, w, c)


def te_step(road: GridRoad, step_index: int, dt: float,
            left: BoundaryData, right: BoundaryData) -> GridRoad:
    """One transport-equilibrium step (sampling stage, then flux stage).

    Stage one replaces cell j by the intermediate state of the Riemann
    problem with its left neighbour whenever the van der Corput value
    alpha_{s+1} falls inside (0, (dt/dx) v_j); the replacement carries the
    neighbour's labels exactly.  Stage two updates the sampled states
    conservatively, where the flux on the left interface falls back to the
    cell's own flux whenever the sampled state is not the intermediate state
    of (old left neighbour, sampled cell) — this is what stops half-mixed
    label states from leaking through interfaces.

    Both boundaries must provide ghost states; imposed boundary fluxes are
    not used here (the ghost reproduces them through the flux formula).
    """
    if left.ghost is None or right.ghost is None:
        raise ValidationError("the sampling step needs ghost states at both ends")
    _require_cfl(dt, road.dx, road.rho, road.w, road.c, road.gamma, "road")
    gamma = road.gamma
    r = dt / road.dx
    alpha = van_der_corput(step_index + 1)
    lg, rg = left.ghost, right.ghost

    rho_minus = np.concatenate(([lg.rho], road.rho[:-1]))
    w_minus = np.concatenate(([lg.w], road.w[:-1]))
    c_minus = np.concatenate(([lg.c], road.c[:-1]))

    # stage one: Glimm sampling against the left neighbour
    v = velocity(road.rho, road.w, road.c, gamma)
    sampled = alpha < r * v
    same_left = np.equal(w_minus, road.w) & np.equal(c_minus, road.c)
    rho_mid = np.where(same_left, road.rho,
                       density_at_velocity(w_minus, c_minus, v, gamma))
    rho_h = np.where(sampled, rho_mid, road.rho)
    w_h = np.where(sampled, w_minus, road.w)
    c_h = np.where(sampled, c_minus, road.c)

    # stage two: left-interface flux per cell, gated by the contact test
    v_h = velocity(rho_h, w_h, c_h, gamma)
    same_h = np.equal(w_minus, w_h) & np.equal(c_minus, c_h)
    rho_mid_h = np.where(same_h, rho_h,
                         density_at_velocity(w_minus, c_minus, v_h, gamma))
    is_intermediate = (
        np.isclose(rho_mid_h, rho_h, rtol=1e-12, atol=1e-14)
        & np.isclose(w_minus, w_h, rtol=1e-12, atol=1e-14)
        & np.isclose(c_minus, c_h, rtol=1e-12, atol=1e-14))
    flux_upwind = godunov_flux(rho_minus, w_minus, c_minus,
                               rho_h, w_h, c_h, gamma)
    flux_self = flux(rho_h, w_h, c_h, gamma)
    flux_in = np.where(is_intermediate, flux_upwind, flux_self)

    # right-interface flux per cell, against the OLD right neighbour
    rho_plus = np.concatenate((road.rho[1:], [rg.rho]))
    w_plus = np.concatenate((road.w[1:], [rg.w]))
    c_plus = np.concatenate((road.c[1:], [rg.c]))
    flux_out = godunov_flux(rho_h, w_h, c_h, rho_plus, w_plus, c_plus, gamma)

    m0 = rho_h - r * (flux_out[0] - flux_in[0])
    m1 = rho_h * w_h - r * (flux_out[1] - flux_in[1])
    m2 = rho_h * c_h - r * (flux_out[2] - flux_in[2])
    rho, w, c = _recover(m0, m1, m2, w_h, c_h)
    return GridRoad(road.dx, gamma, rho, w, c)


@dataclass
class LwrGridRoad:
    """Scalar road for the first-order baseline: V(rho) = w - c * rho**gamma.

    w and c are fixed per road; only the density evolves.
    """

    dx: float
    gamma: float
    w: float
    c: float
    rho: np.ndarray

    def copy(self) -> "LwrGridRoad":
        return LwrGridRoad(self.dx, self.gamma, self.w, self.c, self.rho.copy())

    def velocities(self) -> np.ndarray:
        return velocity(self.rho, self.w, self.c, self.gamma)


@dataclass(frozen=True)
class LwrBoundary:
    """Scalar-model boundary: a ghost density and/or an imposed flux."""

    ghost_rho: float | None = None
    flux: float | None = None


def lwr_godunov_step(road: LwrGridRoad, dt: float,
                     left: LwrBoundary, right: LwrBoundary) -> LwrGridRoad:
    """One scalar Godunov step with demand/supply interface fluxes.

    Mirrors the three-field update exactly so that a three-field run with
    uniform labels reproduces it bit for bit.
    """
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt!r}")
    rho = road.rho
    speed = np.abs(road.w - (road.gamma + 1.0) * road.c * pow_gamma(rho, road.gamma))
    if rho.size and (dt / road.dx) * float(speed.max()) > 0.5:
        j = int(np.argmax(speed))
        raise CflViolationError((dt / road.dx) * float(speed.max()), j, "road")
    if left.ghost_rho is None and left.flux is None:
        raise ValidationError("left boundary needs a ghost density or a flux")
    if right.ghost_rho is None and right.flux is None:
        raise ValidationError("right boundary needs a ghost density or a flux")
    lrho = rho[0] if left.ghost_rho is None else left.ghost_rho
    rrho = rho[-1] if right.ghost_rho is None else right.ghost_rho
    rho_minus = np.concatenate(([lrho], rho))
    rho_plus = np.concatenate((rho, [rrho]))
    q = np.minimum(demand_ap(rho_minus, road.w, road.c, road.gamma),
                   supply_ap(rho_plus, road.w, road.c, road.gamma))
    if left.flux is not None:
        q[0] = left.flux
    if right.flux is not None:
        q[-1] = right.flux
    r = dt / road.dx
    m0 = rho - r * (q[1:] - q[:-1])
    if np.any(m0 < -1e-12):
        raise ValidationError(
            f"update produced negative density {float(m0.min())!r}")
    return LwrGridRoad(road.dx, road.gamma, road.w, road.c, np.maximum(m0, 0.0))
