"""Figure builders for simulation records and pressure tables.

Figures are built directly on matplotlib.figure.Figure so rendering stays
headless; save_figure writes PNG (or whatever the extension asks for).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .coupling import pressure_coefficient
from .core import ValidationError, pow_gamma
from .homogenized import HomogenizedPressureTable, eval_pstar
from .simulator import SimulationRecord

__all__ = [
    "profile_figure",
    "marker_figure",
    "pressure_comparison_figure",
    "save_figure",
]


def _pick_time(record: SimulationRecord, time_index: int) -> tuple[int, float]:
    k = int(time_index)
    if k < 0:
        k += len(record.times)
    if not 0 <= k < len(record.times):
        raise ValidationError(
            f"time index {time_index} outside the {len(record.times)} outputs")
    return k, float(record.times[k])


def profile_figure(record: SimulationRecord, road_ids=None,
                   time_index: int = -1) -> Figure:
    """Density and velocity against x, one line per road."""
    k, t = _pick_time(record, time_index)
    ids = sorted(record.fields) if road_ids is None else list(road_ids)
    fig = Figure(figsize=(7.0, 6.0))
    ax_rho, ax_v = fig.subplots(2, 1, sharex=True)
    for rid in ids:
        xs = record.x_centers[rid]
        ax_rho.plot(xs, record.fields[rid]["rho"][k], label=rid)
        ax_v.plot(xs, record.fields[rid]["v"][k], label=rid)
    ax_rho.set_ylabel("density")
    ax_v.set_ylabel("velocity")
    ax_v.set_xlabel("x")
    ax_rho.set_title(f"profiles at t = {t:g}")
    ax_rho.legend(fontsize="small")
    fig.tight_layout()
    return fig


def marker_figure(record: SimulationRecord, road_ids=None,
                  time_index: int = -1) -> Figure:
    """Marker w along roads chained end to start, in the given order."""
    k, t = _pick_time(record, time_index)
    ids = sorted(record.fields) if road_ids is None else list(road_ids)
    fig = Figure(figsize=(8.0, 4.0))
    ax = fig.subplots()
    offset = 0.0
    for rid in ids:
        xs = record.x_centers[rid]
        ax.plot(xs + offset, record.fields[rid]["w"][k], label=rid)
        dx = xs[1] - xs[0] if len(xs) > 1 else 2.0 * xs[0]
        offset += float(xs[-1]) + dx / 2.0
    ax.set_xlabel("chained x")
    ax.set_ylabel("marker w")
    ax.set_title(f"markers at t = {t:g}")
    ax.legend(fontsize="x-small", ncol=3)
    fig.tight_layout()
    return fig


def pressure_comparison_figure(table: HomogenizedPressureTable,
                               size: int = 400) -> Figure:
    """Exact homogenized pressure, its closed form, and the base law."""
    rho_hi = float(table.rho[0])
    rho = np.linspace(rho_hi / size, rho_hi, size)
    p_star = eval_pstar(table, rho)
    c_bar = pressure_coefficient(table.c0, table.priorities, table.markers,
                                 table.gamma)
    p_approx = c_bar * pow_gamma(rho, table.gamma)
    p_ref = table.c0 * pow_gamma(rho, table.gamma)
    fig = Figure(figsize=(6.0, 4.5))
    ax = fig.subplots()
    ax.plot(rho, p_star, label="implicit pressure")
    ax.plot(rho, p_approx, "--", label="approximation")
    ax.plot(rho, p_ref, ":", label="base law")
    ax.set_xlabel("density")
    ax.set_ylabel("pressure")
    ax.set_title(f"w_bar = {table.w_bar:g}, c_bar = {c_bar:.6g}")
    ax.legend()
    fig.tight_layout()
    return fig


def save_figure(fig: Figure, path, dpi: int = 150) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=dpi)
    return path
