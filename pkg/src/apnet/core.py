"""Primitive traffic states and pointwise model quantities.

The state on a road is the triple (rho, w, c): density, Lagrangian marker,
and pressure coefficient.  The pressure law is p(rho) = c * rho**gamma, the
velocity is recovered as v = w - p(rho), and the conserved vector is
Y = (rho, rho*w, rho*c).  The marker w and the coefficient c ride along with
the flow; only the first characteristic field is genuinely nonlinear.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

#: Densities below this threshold are treated as vacuum.  In a vacuum cell the
#: marker and the coefficient are passive labels carried from the previous
#: state instead of being recovered from the (degenerate) conserved vector.
VACUUM_RHO = 1e-10


class ValidationError(ValueError):
    """A state, road, junction or scenario violates a model invariant."""


class NegativeVelocityWarning(UserWarning):
    """Initial data imply v < 0 somewhere; flow directions become ambiguous."""


def pow_gamma(x, gamma):
    """x**gamma, returning x unchanged when gamma == 1.

    The shortcut is not an optimization detail only: it guarantees that for
    gamma = 1 every formula degenerates to the linear-pressure arithmetic
    bit for bit, which the scalar-model reduction tests rely on.
    """
    if gamma == 1.0:
        return x
    return np.power(x, gamma)


def root_gamma(x, gamma):
    """x**(1/gamma), returning x unchanged when gamma == 1."""
    if gamma == 1.0:
        return x
    return np.power(x, 1.0 / gamma)


def velocity(rho, w, c, gamma):
    """Velocity v = w - c * rho**gamma (elementwise)."""
    return w - c * pow_gamma(rho, gamma)


def flux(rho, w, c, gamma):
    """Flux vector (rho*v, rho*w*v, rho*c*v) of the conserved quantities.

    Returns an array of shape (3,) for scalar input and (3, n) for arrays.
    """
    q = rho * velocity(rho, w, c, gamma)
    return np.stack([q, w * q, c * q])


def eigenvalues(rho, w, c, gamma):
    """Characteristic speeds (v - gamma*c*rho**gamma, v, v).

    The second and third fields are linearly degenerate; away from vacuum
    lambda_1 < lambda_2 = lambda_3, so the system is strictly hyperbolic in
    the first field for rho > 0.
    """
    v = velocity(rho, w, c, gamma)
    return np.stack([v - gamma * c * pow_gamma(rho, gamma), v, v])


def critical_density(w, c, gamma):
    """Density sigma maximising the flux rho * (w - c*rho**gamma).

    sigma = (w / ((gamma+1) c))**(1/gamma); returns 0 for w <= 0, where no
    admissible flow exists.
    """
    base = np.maximum(w, 0.0) / ((gamma + 1.0) * c)
    return root_gamma(base, gamma)


@dataclass(frozen=True)
class PressureLaw:
    """Power-law pressure p(rho) = coefficient * rho**exponent."""

    coefficient: float
    exponent: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.coefficient) and self.coefficient > 0):
            raise ValidationError(
                f"pressure coefficient must be positive and finite, got {self.coefficient!r}")
        if not (np.isfinite(self.exponent) and self.exponent >= 1):
            raise ValidationError(
                f"pressure exponent must be >= 1, got {self.exponent!r}")

    def __call__(self, rho):
        return self.coefficient * pow_gamma(rho, self.exponent)


@dataclass(frozen=True)
class RoadState:
    """Pointwise traffic state (rho, w, c)."""

    rho: float
    w: float
    c: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.rho) and self.rho >= 0):
            raise ValidationError(f"density must be finite and >= 0, got {self.rho!r}")
        if not np.isfinite(self.w):
            raise ValidationError(f"marker must be finite, got {self.w!r}")
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValidationError(f"pressure coefficient must be positive, got {self.c!r}")

    def velocity(self, gamma: float) -> float:
        return float(velocity(self.rho, self.w, self.c, gamma))

    def flux(self, gamma: float) -> np.ndarray:
        return flux(self.rho, self.w, self.c, gamma)

    def eigenvalues(self, gamma: float) -> np.ndarray:
        return eigenvalues(self.rho, self.w, self.c, gamma)

    @property
    def is_vacuum(self) -> bool:
        return self.rho < VACUUM_RHO


def to_conservative(state: RoadState) -> np.ndarray:
    """Conserved vector Y = (rho, rho*w, rho*c)."""
    return np.array([state.rho, state.rho * state.w, state.rho * state.c])


def from_conservative(m, fallback_w: float, fallback_c: float,
                      vacuum_rho: float = VACUUM_RHO) -> RoadState:
    """Recover (rho, w, c) from a conserved vector.

    Below the vacuum threshold the state degenerates: the density is set to
    zero and (fallback_w, fallback_c) are carried as passive labels, normally
    taken from the previous state of the same cell.
    """
    m0, m1, m2 = float(m[0]), float(m[1]), float(m[2])
    if m0 < 0:
        raise ValidationError(f"negative mass component {m0!r}")
    if m0 <= vacuum_rho:
        return RoadState(0.0, fallback_w, fallback_c)
    return RoadState(m0, m1 / m0, m2 / m0)


@dataclass(frozen=True)
class InitialSegment:
    """One piece of a piecewise-constant initial profile, valid up to x_end."""

    x_end: float
    rho: float
    w: float


@dataclass(frozen=True)
class Road:
    """Static description of one directed road.

    The initial pressure coefficient c0 = pressure.coefficient is uniform
    along the road; it is also the immutable reference coefficient used when
    a junction upstream recomputes its adapted pressure.
    """

    id: str
    length: float
    cells: int
    pressure: PressureLaw
    profile: tuple[InitialSegment, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("road id must be a non-empty string")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValidationError(f"road {self.id!r}: length must be positive, got {self.length!r}")
        if self.cells < 1:
            raise ValidationError(f"road {self.id!r}: needs at least one cell, got {self.cells}")
        if not self.profile:
            raise ValidationError(f"road {self.id!r}: empty initial profile")
        prev = 0.0
        for seg in self.profile:
            if not seg.x_end > prev:
                raise ValidationError(
                    f"road {self.id!r}: profile breakpoints must increase, got x_end={seg.x_end!r}")
            if not (np.isfinite(seg.rho) and seg.rho >= 0):
                raise ValidationError(f"road {self.id!r}: profile density {seg.rho!r} invalid")
            if not np.isfinite(seg.w):
                raise ValidationError(f"road {self.id!r}: profile marker {seg.w!r} invalid")
            prev = seg.x_end
        if abs(prev - self.length) > 1e-12 * max(1.0, self.length):
            raise ValidationError(
                f"road {self.id!r}: profile covers [0, {prev!r}], expected [0, {self.length!r}]")
        gamma = self.pressure.exponent
        for seg in self.profile:
            v = float(velocity(seg.rho, seg.w, self.pressure.coefficient, gamma))
            if v < 0:
                warnings.warn(
                    f"road {self.id!r}: initial state (rho={seg.rho}, w={seg.w}) has "
                    f"negative velocity v={v}; junction fluxes are clamped at zero",
                    NegativeVelocityWarning, stacklevel=2)

    @property
    def dx(self) -> float:
        return self.length / self.cells

    @property
    def c0(self) -> float:
        return self.pressure.coefficient

    def x_centers(self) -> np.ndarray:
        return (np.arange(self.cells) + 0.5) * self.dx

    def initial_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cell-centred initial data (rho, w, c); c starts uniform at c0."""
        xs = self.x_centers()
        ends = np.array([seg.x_end for seg in self.profile])
        idx = np.searchsorted(ends, xs, side="left")
        idx = np.minimum(idx, len(self.profile) - 1)
        rho = np.array([self.profile[k].rho for k in idx], dtype=float)
        w = np.array([self.profile[k].w for k in idx], dtype=float)
        c = np.full(self.cells, self.c0, dtype=float)
        return rho, w, c


@dataclass(frozen=True)
class Junction:
    """Coupling node: incoming roads feed outgoing roads.

    distribution[j][i] is the fraction of the flux leaving incoming road i
    that is routed to outgoing road j; each column must sum to one.  The
    priorities are merge proportions over the incoming roads and sum to one.
    """

    id: str
    incoming: tuple[str, ...]
    outgoing: tuple[str, ...]
    distribution: tuple[tuple[float, ...], ...]
    priorities: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("junction id must be a non-empty string")
        n, m = len(self.incoming), len(self.outgoing)
        if n < 1 or m < 1:
            raise ValidationError(f"junction {self.id!r}: needs incoming and outgoing roads")
        if len(set(self.incoming)) != n or len(set(self.outgoing)) != m:
            raise ValidationError(f"junction {self.id!r}: duplicate road attachment")
        if len(self.distribution) != m or any(len(row) != n for row in self.distribution):
            raise ValidationError(
                f"junction {self.id!r}: distribution must have shape ({m}, {n})")
        a = np.asarray(self.distribution, dtype=float)
        if np.any(a < 0) or np.any(a > 1):
            raise ValidationError(f"junction {self.id!r}: distribution entries must lie in [0, 1]")
        colsum = a.sum(axis=0)
        if np.any(np.abs(colsum - 1.0) > 1e-9):
            raise ValidationError(
                f"junction {self.id!r}: distribution columns must sum to 1, got {colsum.tolist()}")
        if len(self.priorities) != n:
            raise ValidationError(f"junction {self.id!r}: needs one priority per incoming road")
        b = np.asarray(self.priorities, dtype=float)
        if np.any(b < 0):
            raise ValidationError(f"junction {self.id!r}: priorities must be >= 0")
        if abs(b.sum() - 1.0) > 1e-9:
            raise ValidationError(
                f"junction {self.id!r}: priorities must sum to 1, got {b.sum()!r}")

    @property
    def distribution_matrix(self) -> np.ndarray:
        return np.asarray(self.distribution, dtype=float)

    @property
    def priority_vector(self) -> np.ndarray:
        return np.asarray(self.priorities, dtype=float)
