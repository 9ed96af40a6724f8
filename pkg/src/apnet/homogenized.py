"""Numerical reference for the exact homogenized pressure at a merge.

Downstream of a merge the mixture of incoming flows behaves, in the
homogenization limit, like a single road whose pressure law is defined
implicitly: at common velocity v each incoming contribution occupies
specific volume (c0 / (w_i - v))**(1/gamma) per vehicle, weighted by its
merge proportion.  Inverting the resulting volume-velocity relation gives a
density-pressure table that the adapted power-law coefficient approximates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ValidationError
from .coupling import homogenized_marker

#: Fraction of the admissible velocity interval covered by a table; the last
#: sliver below the smallest participating marker is excluded because the
#: specific volume diverges there.
_EDGE_MARGIN = 1e-6


def tau(v, priorities, markers, c0, gamma):
    """Homogenized specific volume at common velocity v.

    tau(v) = sum_i beta_i * (c0 / (w_i - v))**(1/gamma) over the incoming
    roads with beta_i > 0.  Defined for v below every participating marker.
    """
    b = np.asarray(priorities, dtype=float)
    w = np.asarray(markers, dtype=float)
    mask = b > 0
    if not mask.any():
        raise ValidationError("specific volume undefined: no inflow share is positive")
    b, w = b[mask], w[mask]
    vs = np.asarray(v, dtype=float)
    if np.any(vs >= w.min()):
        raise ValidationError(
            f"specific volume diverges at v >= {w.min()!r}, got v={v!r}")
    vv = np.atleast_1d(vs)
    contrib = (c0 / (w[:, np.newaxis] - vv[np.newaxis, :])) ** (1.0 / gamma)
    out = (b[:, np.newaxis] * contrib).sum(axis=0)
    return out if vs.ndim else float(out[0])


@dataclass(frozen=True)
class HomogenizedPressureTable:
    """Tabulated exact pressure p*(rho) for one merge configuration.

    velocities descend as rho ascends along the table; w_bar is the
    homogenized marker, so p*(rho(v)) = w_bar - v by construction.
    """

    velocities: np.ndarray
    rho: np.ndarray
    p_star: np.ndarray
    priorities: tuple[float, ...]
    markers: tuple[float, ...]
    c0: float
    gamma: float
    w_bar: float


def build_table(priorities, markers, c0, gamma,
                size: int = 10001) -> HomogenizedPressureTable:
    """Sample the exact homogenized pressure on a velocity grid.

    Velocities run from 0 up to just below the smallest participating
    marker; the induced densities decrease from 1/tau(0) towards 0.
    """
    if size < 2:
        raise ValidationError(f"table needs at least 2 points, got {size}")
    b = np.asarray(priorities, dtype=float)
    w = np.asarray(markers, dtype=float)
    mask = b > 0
    if not mask.any():
        raise ValidationError("table undefined: no inflow share is positive")
    w_min = w[mask].min()
    if w_min <= 0:
        raise ValidationError(
            f"table needs positive participating markers, got {w.tolist()}")
    w_bar = homogenized_marker(b, w)
    velocities = np.linspace(0.0, (1.0 - _EDGE_MARGIN) * w_min, size)
    volumes = tau(velocities, priorities, markers, c0, gamma)
    rho = 1.0 / volumes
    p_star = w_bar - velocities
    return HomogenizedPressureTable(
        velocities=velocities, rho=rho, p_star=p_star,
        priorities=tuple(float(x) for x in b),
        markers=tuple(float(x) for x in w),
        c0=float(c0), gamma=float(gamma), w_bar=float(w_bar))


def eval_pstar(table: HomogenizedPressureTable, rho):
    """Interpolate the exact pressure at the given densities.

    Valid strictly inside the tabulated density range (0, rho(0)]; the table
    cannot say anything about denser states.
    """
    rs = np.asarray(rho, dtype=float)
    lo, hi = table.rho[-1], table.rho[0]
    if np.any(rs < lo) or np.any(rs > hi * (1 + 1e-12)):
        raise ValidationError(
            f"density outside tabulated range [{lo!r}, {hi!r}]")
    # np.interp wants ascending abscissae; the table descends in rho
    out = np.interp(rs, table.rho[::-1], table.p_star[::-1])
    return out if rs.ndim else float(out)
