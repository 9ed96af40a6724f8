"""Self-similar Riemann solutions for the two-field model with carried c.

The wave fan between two states has at most three waves: a 1-shock or
1-rarefaction connecting the left state to an intermediate state that keeps
(w, c) from the left, and a contact at the downstream velocity across which
only the labels change.  The intermediate state may be vacuum when the
downstream velocity exceeds the left marker.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RoadState, ValidationError, pow_gamma, root_gamma, velocity


@dataclass(frozen=True)
class RiemannSolution:
    """Wave structure of one Riemann problem.

    wave_kind describes the first field: 'shock', 'rarefaction', or 'none'
    when left and intermediate states agree to rounding.  fan_range is the
    closed speed interval of the rarefaction (None otherwise); shock_speed is
    None unless wave_kind == 'shock'.  For a vacuum intermediate state the
    fan ends at the left marker and the contact sits at the downstream
    velocity, with vacuum in between.
    """

    left: RoadState
    right: RoadState
    star: RoadState
    gamma: float
    wave_kind: str
    shock_speed: float | None
    fan_range: tuple[float, float] | None
    contact_speed: float
    has_vacuum: bool


def _fan_state(xi, w, c, gamma):
    """State inside a 1-rarefaction fan at similarity speed xi."""
    rho = root_gamma(np.maximum(w - xi, 0.0) / ((gamma + 1.0) * c), gamma)
    return rho


def solve(left: RoadState, right: RoadState, gamma: float,
          tie_tol: float = 1e-12) -> RiemannSolution:
    """Solve the Riemann problem with data (left, right).

    The intermediate state carries (w, c) from the left and moves with the
    velocity of the right state.  Velocities closer than tie_tol produce no
    first-field wave.
    """
    if gamma < 1:
        raise ValidationError(f"pressure exponent must be >= 1, got {gamma!r}")
    v_left = left.velocity(gamma)
    v_right = right.velocity(gamma)

    if left.w - v_right > 0:
        rho_star = float(root_gamma((left.w - v_right) / left.c, gamma))
        has_vacuum = False
    else:
        rho_star = 0.0
        has_vacuum = True
    star = RoadState(rho_star, left.w, left.c)

    contact_speed = v_right
    scale = max(abs(v_left), abs(v_right), 1.0)
    if abs(v_right - v_left) <= tie_tol * scale:
        return RiemannSolution(left, right, star, gamma, "none",
                               None, None, contact_speed, has_vacuum)

    if v_right < v_left:
        # compression: the 1-wave is a shock (rho_star > rho_left > 0)
        q_star = rho_star * v_right
        q_left = left.rho * v_left
        s = (q_star - q_left) / (rho_star - left.rho)
        return RiemannSolution(left, right, star, gamma, "shock",
                               float(s), None, contact_speed, has_vacuum)

    # expansion: 1-rarefaction from lambda_1(left) up to lambda_1(star);
    # with vacuum the fan stretches to the left marker and a vacuum zone
    # separates it from the contact.
    lam_left = float(v_left - gamma * left.c * pow_gamma(left.rho, gamma))
    if has_vacuum:
        lam_star = float(left.w)
    else:
        lam_star = float(v_right - gamma * left.c * pow_gamma(rho_star, gamma))
    return RiemannSolution(left, right, star, gamma, "rarefaction",
                           None, (lam_left, lam_star), contact_speed, has_vacuum)


def evaluate(solution: RiemannSolution, xi: float) -> RoadState:
    """Sample the self-similar solution at speed xi = x / t.

    Convention: a shock at speed s assigns the left value for xi < s and the
    star value at xi = s; the contact assigns the star value for xi < contact
    and the right value from the contact on; rarefaction fans are closed
    intervals.
    """
    left, right, star, gamma = (solution.left, solution.right,
                                solution.star, solution.gamma)
    if xi >= solution.contact_speed:
        return right
    if solution.wave_kind == "none":
        return star
    if solution.wave_kind == "shock":
        return left if xi < solution.shock_speed else star
    lo, hi = solution.fan_range
    if xi < lo:
        return left
    if xi <= hi:
        rho = float(_fan_state(xi, left.w, left.c, gamma))
        return RoadState(rho, left.w, left.c)
    # past the fan but before the contact: vacuum zone (or, without vacuum,
    # the star state; then hi = lambda_1(star) <= contact and the zone is
    # the star wedge)
    if solution.has_vacuum:
        return RoadState(0.0, left.w, left.c)
    return star


def profile(solution: RiemannSolution, x: np.ndarray, t: float,
            x0: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample the solution at time t > 0 on positions x (jump at x0)."""
    if t <= 0:
        raise ValidationError(f"profile needs t > 0, got {t!r}")
    xs = np.asarray(x, dtype=float)
    rho = np.empty_like(xs)
    w = np.empty_like(xs)
    c = np.empty_like(xs)
    for k, xi in enumerate((xs - x0) / t):
        st = evaluate(solution, float(xi))
        rho[k], w[k], c[k] = st.rho, st.w, st.c
    return rho, w, c
