"""Network driver: junction bookkeeping, per-road stepping, and scenarios.

One simulation step proceeds in two phases.  First every junction is
resolved on the current cell states: incoming markers are re-read (vacuum
ends keep their last reading), a changed homogenized marker triggers a
pressure-coefficient restart from the outgoing road's immutable initial
coefficient, and the junction throughput is maximised.  Second, every road
advances one step of the selected scheme using boundary data derived from
the junction fluxes.  All roads read the pre-step states, so the update
order of roads cannot influence the result.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass

import numpy as np

from . import riemann
from .core import (
    VACUUM_RHO,
    InitialSegment,
    Junction,
    PressureLaw,
    Road,
    RoadState,
    ValidationError,
    root_gamma,
)
from .coupling import (
    boundary_state,
    demand_ap,
    homogenized_marker,
    junction_shares,
    maximize_junction_flux,
    pressure_coefficient,
    resolve_junction,
    supply_ap,
)
from .scheme import (
    BoundaryData,
    GridRoad,
    LwrBoundary,
    LwrGridRoad,
    godunov_step,
    lwr_godunov_step,
    te_step,
)


@dataclass(frozen=True)
class BoundarySpec:
    """Source or sink attached to one road end.

    kind 'inflow' (start of a road): the ghost state follows a right-
    continuous step function of time given by series entries (t, rho, w);
    the ghost coefficient is the road's initial one.  kind 'free_outflow'
    (end of a road): transparent boundary, the ghost mirrors the last cell,
    so free-flowing traffic leaves unhindered while a standing jam is held
    rather than drained.
    """

    road: str
    end: str                   # 'start' | 'end'
    kind: str                  # 'inflow' | 'free_outflow'
    series: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.end not in ("start", "end"):
            raise ValidationError(f"boundary end must be 'start' or 'end', got {self.end!r}")
        if self.kind not in ("inflow", "free_outflow"):
            raise ValidationError(
                f"boundary kind must be 'inflow' or 'free_outflow', got {self.kind!r}")
        if self.kind == "inflow":
            if self.end != "start":
                raise ValidationError("inflow boundaries attach to the start of a road")
            if not self.series:
                raise ValidationError(f"inflow boundary on {self.road!r} needs a series")
            times = [entry[0] for entry in self.series]
            if times[0] > 0:
                raise ValidationError(
                    f"inflow series on {self.road!r} must start at t <= 0, got {times[0]!r}")
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValidationError(f"inflow series times on {self.road!r} must increase")
        elif self.end != "end":
            raise ValidationError("free outflow boundaries attach to the end of a road")

    def state_at(self, t: float, c0: float) -> RoadState:
        idx = 0
        for k, entry in enumerate(self.series):
            if entry[0] <= t:
                idx = k
        _, rho, w = self.series[idx]
        return RoadState(rho, w, c0)


@dataclass(frozen=True)
class Network:
    """A directed road network plus run configuration."""

    gamma: float
    roads: tuple[Road, ...]
    junctions: tuple[Junction, ...]
    boundaries: tuple[BoundarySpec, ...]
    horizon: float
    dt_ratio: float = 0.25
    output_every: int = 1
    scheme: str = "te"          # 'te' | 'godunov'
    model: str = "ap"           # 'ap' | 'lwr'
    lwr_marker: float | None = None

    def __post_init__(self) -> None:
        if not self.roads:
            raise ValidationError("network needs at least one road")
        if self.horizon <= 0:
            raise ValidationError(f"horizon must be positive, got {self.horizon!r}")
        if self.dt_ratio <= 0:
            raise ValidationError(f"dt ratio must be positive, got {self.dt_ratio!r}")
        if self.output_every < 1:
            raise ValidationError(f"output cadence must be >= 1, got {self.output_every!r}")
        if self.scheme not in ("te", "godunov"):
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        if self.model not in ("ap", "lwr"):
            raise ValidationError(f"unknown model {self.model!r}")
        ids = [r.id for r in self.roads]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate road ids")
        by_id = {r.id: r for r in self.roads}
        for road in self.roads:
            if road.pressure.exponent != self.gamma:
                raise ValidationError(
                    f"road {road.id!r} has pressure exponent {road.pressure.exponent!r}, "
                    f"network uses gamma = {self.gamma!r}")
        starts: dict[str, str] = {}
        ends: dict[str, str] = {}

        def claim(table, road_id, owner, side):
            if road_id not in by_id:
                raise ValidationError(f"{owner} references unknown road {road_id!r}")
            if road_id in table:
                raise ValidationError(
                    f"road {road_id!r} {side} is attached to both "
                    f"{table[road_id]} and {owner}")
            table[road_id] = owner

        for junction in self.junctions:
            for rid in junction.incoming:
                claim(ends, rid, f"junction {junction.id!r}", "end")
            for rid in junction.outgoing:
                claim(starts, rid, f"junction {junction.id!r}", "start")
        for spec in self.boundaries:
            owner = f"{spec.kind} boundary"
            if spec.end == "start":
                claim(starts, spec.road, owner, "start")
            else:
                claim(ends, spec.road, owner, "end")
        for road in self.roads:
            if road.id not in starts:
                raise ValidationError(f"road {road.id!r} start is unattached")
            if road.id not in ends:
                raise ValidationError(f"road {road.id!r} end is unattached")
        if self.model == "lwr":
            if self.scheme != "godunov":
                raise ValidationError("the scalar model runs with the godunov scheme only")
            if self.lwr_marker is None:
                raise ValidationError(
                    "the scalar model needs lwr_marker to fix V(rho) = marker - c0*rho**gamma")


@dataclass(frozen=True)
class JunctionEvent:
    """One pressure adaption: the homogenized marker moved, the coefficient restarted."""

    junction: str
    outgoing: str
    time: float
    w_old: float
    w_new: float
    ratio: float                # adapted coefficient / initial coefficient


@dataclass
class SimulationRecord:
    """Fields at output times, junction events, and run diagnostics."""

    times: np.ndarray
    x_centers: dict[str, np.ndarray]
    fields: dict[str, dict[str, np.ndarray]]
    events: list[JunctionEvent]
    diagnostics: dict[str, float]

    def final(self, road_id: str, name: str) -> np.ndarray:
        return self.fields[road_id][name][-1]


def detect_adaption(previous: float, new: float, tol: float = 1e-9) -> bool:
    """Has the homogenized marker moved beyond the detection tolerance?"""
    return abs(new - previous) > tol


def jam_density(w: float, c: float, gamma: float) -> float:
    """Density at which the velocity w - c*rho**gamma reaches zero."""
    return float(root_gamma(w / c, gamma))


class _JunctionRuntime:
    """Mutable per-junction state across steps.

    Incoming markers are the last non-vacuum readings of the incoming end
    cells: a vacuum end carries no traffic, so it contributes its previous
    reading to the mixture instead of a label that no vehicle holds.
    """

    def __init__(self, junction: Junction, network: Network,
                 roads: dict[str, Road]):
        self.junction = junction
        self.shares = junction_shares(junction)
        self.c0 = np.array([roads[rid].c0 for rid in junction.outgoing])
        self.markers = np.full(len(junction.incoming), np.nan)
        self.w_bar = np.full(len(junction.outgoing), np.nan)
        self.c_bar = np.full(len(junction.outgoing), np.nan)

    def read_markers(self, last_states: list[RoadState]) -> None:
        for i, st in enumerate(last_states):
            if st.rho > VACUUM_RHO or not np.isfinite(self.markers[i]):
                self.markers[i] = st.w

    def mixture(self, j: int) -> float:
        return float(np.dot(self.shares[j], self.markers))


def _junction_phase(runtime: _JunctionRuntime, last_states, gamma, t, s,
                    events: list[JunctionEvent], outgoing_first_states):
    """Marker bookkeeping, coefficient adaption and flux maximisation."""
    junction = runtime.junction
    if s == 0:
        runtime.markers[:] = [st.w for st in last_states]
    else:
        runtime.read_markers(last_states)
    for j, rid in enumerate(junction.outgoing):
        if not np.isfinite(runtime.shares[j]).all():
            if s == 0:
                runtime.w_bar[j] = outgoing_first_states[j].w
                runtime.c_bar[j] = runtime.c0[j]
            continue
        w_new = runtime.mixture(j)
        if s == 0:
            c_new = pressure_coefficient(runtime.c0[j], runtime.shares[j],
                                         runtime.markers, gamma)
            runtime.w_bar[j] = w_new
            runtime.c_bar[j] = c_new
            if abs(c_new - runtime.c0[j]) > 1e-12 * runtime.c0[j]:
                events.append(JunctionEvent(junction.id, rid, t, w_new, w_new,
                                            c_new / runtime.c0[j]))
        elif detect_adaption(runtime.w_bar[j], w_new):
            c_new = pressure_coefficient(runtime.c0[j], runtime.shares[j],
                                         runtime.markers, gamma)
            events.append(JunctionEvent(junction.id, rid, t, runtime.w_bar[j],
                                        w_new, c_new / runtime.c0[j]))
            runtime.w_bar[j] = w_new
            runtime.c_bar[j] = c_new
        else:
            runtime.w_bar[j] = w_new

    resolution = resolve_junction(junction, last_states, outgoing_first_states,
                                  runtime.w_bar, runtime.c_bar, gamma)
    return resolution.inflow, resolution.outflow


def _imposed(q: float, w: float, c: float) -> np.ndarray:
    return np.array([q, w * q, c * q])


def run(network: Network) -> SimulationRecord:
    """Run the configured simulation and collect fields, events, diagnostics."""
    started = _time.perf_counter()
    if network.model == "lwr":
        record = _run_lwr(network)
    else:
        record = _run_ap(network)
    record.diagnostics["runtime_seconds"] = _time.perf_counter() - started
    return record


def _time_grid(network: Network):
    dx_min = min(road.dx for road in network.roads)
    dt = network.dt_ratio * dx_min
    n_steps = int(round(network.horizon / dt))
    if abs(n_steps * dt - network.horizon) > 1e-9 * network.horizon:
        n_steps = int(np.ceil(network.horizon / dt - 1e-12))
    return dt, n_steps


def _record_shot(store, times, t, grids, gamma):
    times.append(t)
    for rid, grid in grids.items():
        entry = store[rid]
        entry["rho"].append(grid.rho.copy())
        entry["v"].append(np.asarray(grid.velocities(), dtype=float).copy())
        if isinstance(grid, GridRoad):
            entry["w"].append(grid.w.copy())
            entry["c"].append(grid.c.copy())


def _finalize(network, times, store, events, diagnostics, extra_fields=None):
    fields = {}
    for road in network.roads:
        entry = {name: np.stack(series) for name, series in store[road.id].items()}
        if extra_fields is not None:
            entry.update(extra_fields[road.id])
        fields[road.id] = entry
    events.sort(key=lambda e: (e.time, e.junction, e.outgoing))
    return SimulationRecord(
        times=np.array(times),
        x_centers={road.id: road.x_centers() for road in network.roads},
        fields=fields,
        events=events,
        diagnostics=diagnostics,
    )


def _run_ap(network: Network) -> SimulationRecord:
    gamma = network.gamma
    roads = {road.id: road for road in network.roads}
    grids: dict[str, GridRoad] = {}
    for road in network.roads:
        rho, w, c = road.initial_arrays()
        grids[road.id] = GridRoad(road.dx, gamma, rho, w, c)
    runtimes = [_JunctionRuntime(j, network, roads) for j in network.junctions]
    sources = {spec.road: spec for spec in network.boundaries if spec.kind == "inflow"}
    sinks = {spec.road: spec for spec in network.boundaries if spec.kind == "free_outflow"}

    dt, n_steps = _time_grid(network)
    stepper = te_step if network.scheme == "te" else godunov_step

    store = {road.id: {"rho": [], "v": [], "w": [], "c": []} for road in network.roads}
    times: list[float] = []
    events: list[JunctionEvent] = []
    mass_err = 0.0
    momentum_err = 0.0

    _record_shot(store, times, 0.0, grids, gamma)
    for s in range(n_steps):
        t = s * dt
        step_dt = min(dt, network.horizon - t)
        left: dict[str, BoundaryData] = {}
        right: dict[str, BoundaryData] = {}

        for runtime in runtimes:
            junction = runtime.junction
            last_states = [
                RoadState(float(grids[rid].rho[-1]), float(grids[rid].w[-1]),
                          float(grids[rid].c[-1]))
                for rid in junction.incoming]
            first_states = [
                RoadState(float(grids[rid].rho[0]), float(grids[rid].w[0]),
                          float(grids[rid].c[0]))
                for rid in junction.outgoing]
            inflow, outflow = _junction_phase(
                runtime, last_states, gamma, t, s, events, first_states)
            mass_err = max(mass_err, abs(inflow.sum() - outflow.sum()))
            momentum_in = sum(st.w * q for st, q in zip(last_states, inflow))
            momentum_out = float(np.dot(runtime.w_bar, outflow))
            momentum_err = max(momentum_err, abs(momentum_in - momentum_out))
            for i, rid in enumerate(junction.incoming):
                st = last_states[i]
                rho_g = boundary_state(float(inflow[i]), st.w, st.c, gamma,
                                       "incoming_end")
                right[rid] = BoundaryData(
                    ghost=RoadState(rho_g, st.w, st.c),
                    flux=_imposed(float(inflow[i]), st.w, st.c))
            for j, rid in enumerate(junction.outgoing):
                w_j, c_j = float(runtime.w_bar[j]), float(runtime.c_bar[j])
                rho_g = boundary_state(float(outflow[j]), w_j, c_j, gamma,
                                       "outgoing_start")
                left[rid] = BoundaryData(
                    ghost=RoadState(rho_g, w_j, c_j),
                    flux=_imposed(float(outflow[j]), w_j, c_j))

        for rid, spec in sources.items():
            left[rid] = BoundaryData(ghost=spec.state_at(t, roads[rid].c0))
        for rid, spec in sinks.items():
            grid = grids[rid]
            right[rid] = BoundaryData(
                ghost=RoadState(float(grid.rho[-1]), float(grid.w[-1]),
                                float(grid.c[-1])))

        if network.scheme == "te":
            grids = {rid: stepper(grid, s, step_dt, left[rid], right[rid])
                     for rid, grid in grids.items()}
        else:
            grids = {rid: stepper(grid, step_dt, left[rid], right[rid])
                     for rid, grid in grids.items()}

        if (s + 1) % network.output_every == 0 or s + 1 == n_steps:
            _record_shot(store, times, t + step_dt, grids, gamma)

    diagnostics = {
        "dt": dt,
        "steps": float(n_steps),
        "junction_mass_error": mass_err,
        "junction_momentum_error": momentum_err,
    }
    return _finalize(network, times, store, events, diagnostics)


def _run_lwr(network: Network) -> SimulationRecord:
    gamma = network.gamma
    w_dyn = float(network.lwr_marker)
    roads = {road.id: road for road in network.roads}
    grids: dict[str, LwrGridRoad] = {}
    static_w: dict[str, np.ndarray] = {}
    for road in network.roads:
        rho, w, _ = road.initial_arrays()
        grids[road.id] = LwrGridRoad(road.dx, gamma, w_dyn, road.c0, rho)
        static_w[road.id] = w
    sources = {spec.road: spec for spec in network.boundaries if spec.kind == "inflow"}
    sinks = {spec.road: spec for spec in network.boundaries if spec.kind == "free_outflow"}

    dt, n_steps = _time_grid(network)
    store = {road.id: {"rho": [], "v": []} for road in network.roads}
    times: list[float] = []
    mass_err = 0.0

    _record_shot(store, times, 0.0, grids, gamma)
    for s in range(n_steps):
        t = s * dt
        step_dt = min(dt, network.horizon - t)
        left: dict[str, LwrBoundary] = {}
        right: dict[str, LwrBoundary] = {}

        for junction in network.junctions:
            demands = np.array([
                float(demand_ap(grids[rid].rho[-1], w_dyn, roads[rid].c0, gamma))
                for rid in junction.incoming])
            supplies = np.array([
                float(supply_ap(grids[rid].rho[0], w_dyn, roads[rid].c0, gamma))
                for rid in junction.outgoing])
            _, inflow, outflow = maximize_junction_flux(junction, demands, supplies)
            mass_err = max(mass_err, abs(inflow.sum() - outflow.sum()))
            for i, rid in enumerate(junction.incoming):
                rho_g = boundary_state(float(inflow[i]), w_dyn, roads[rid].c0,
                                       gamma, "incoming_end")
                right[rid] = LwrBoundary(ghost_rho=rho_g, flux=float(inflow[i]))
            for j, rid in enumerate(junction.outgoing):
                rho_g = boundary_state(float(outflow[j]), w_dyn, roads[rid].c0,
                                       gamma, "outgoing_start")
                left[rid] = LwrBoundary(ghost_rho=rho_g, flux=float(outflow[j]))

        for rid, spec in sources.items():
            left[rid] = LwrBoundary(ghost_rho=spec.state_at(t, roads[rid].c0).rho)
        for rid in sinks:
            right[rid] = LwrBoundary(ghost_rho=float(grids[rid].rho[-1]))

        grids = {rid: lwr_godunov_step(grid, step_dt, left[rid], right[rid])
                 for rid, grid in grids.items()}

        if (s + 1) % network.output_every == 0 or s + 1 == n_steps:
            _record_shot(store, times, t + step_dt, grids, gamma)

    diagnostics = {
        "dt": dt,
        "steps": float(n_steps),
        "junction_mass_error": mass_err,
        "junction_momentum_error": 0.0,
    }
    n_out = len(times)
    extra = {
        rid: {
            "w": np.tile(static_w[rid], (n_out, 1)),
            "c": np.full((n_out, len(static_w[rid])), roads[rid].c0),
        }
        for rid in static_w}
    return _finalize(network, times, store, [], diagnostics, extra_fields=extra)


# ---------------------------------------------------------------------------
# built-in scenarios


def _uniform_road(rid, length, cells, c0, gamma, rho, w) -> Road:
    return Road(rid, length, cells, PressureLaw(c0, gamma),
                (InitialSegment(length, rho, w),))


def scenario_merge21(incoming1=(3.0, 2.0), incoming2=(2.0, 1.0),
                     outgoing=(3.0, 2.0), c0=(1.0, 1.0, 1.0), beta=0.5,
                     gamma=1.0, length=1.0, cells=100, horizon=0.12,
                     dt_ratio=0.1, output_every=0, scheme="te",
                     model="ap", lwr_marker=None) -> Network:
    """Two roads merging into one, all ends fed/drained by open boundaries.

    The default states carry more mass than their markers can move (their
    initial velocities are negative, which triggers a validation warning);
    pass self-consistent states for quantitative studies.
    """
    if not 0 < beta < 1:
        raise ValidationError(f"merge priority must lie in (0, 1), got {beta!r}")
    roads = (
        _uniform_road("in_1", length, cells, c0[0], gamma, *incoming1),
        _uniform_road("in_2", length, cells, c0[1], gamma, *incoming2),
        _uniform_road("out", length, cells, c0[2], gamma, *outgoing),
    )
    junction = Junction("merge", ("in_1", "in_2"), ("out",),
                        ((1.0, 1.0),), (beta, 1.0 - beta))
    boundaries = (
        BoundarySpec("in_1", "start", "inflow", ((0.0, *incoming1),)),
        BoundarySpec("in_2", "start", "inflow", ((0.0, *incoming2),)),
        BoundarySpec("out", "end", "free_outflow"),
    )
    if output_every < 1:
        output_every = max(1, int(round(horizon / (dt_ratio * (length / cells)))))
    return Network(gamma=gamma, roads=roads, junctions=(junction,),
                   boundaries=boundaries, horizon=horizon, dt_ratio=dt_ratio,
                   output_every=output_every, scheme=scheme, model=model,
                   lwr_marker=lwr_marker)


def scenario_sequential(n=10, a=2.0, b=1.0, beta=0.5, rho=0.3, c0=1.0,
                        gamma=1.0, length=0.5, cells=50, horizon=12.0,
                        dt_ratio=0.25, output_every=40, scheme="te",
                        model="ap", congested=False, congested_rho=None,
                        lwr_marker=None) -> Network:
    """Chain of n 2-1 merges, each fed by a side road; marker b enters road 0.

    Roads are road_00 .. road_<n> along the chain and side_01 .. side_<n>
    feeding junctions m01 .. m<n>.  All roads start at the given density with
    marker a, except road_00 which carries the perturbed marker b.

    congested=True floods the final road; the default congested density is
    the jam density of (a, c0), where the velocity vanishes and inflow stops.
    """
    if not 0 < beta < 1:
        raise ValidationError(
            f"merge priority must lie strictly inside (0, 1), got {beta!r}")
    if n < 1:
        raise ValidationError(f"need at least one junction, got n={n!r}")
    if model == "lwr" and lwr_marker is None:
        lwr_marker = a
    roads = []
    junctions = []
    boundaries = []
    main = [f"road_{l:02d}" for l in range(n + 1)]
    side = [f"side_{l:02d}" for l in range(1, n + 1)]
    for l, rid in enumerate(main):
        w0 = b if l == 0 else a
        rho0 = rho
        if congested and l == n:
            rho0 = jam_density(a, c0, gamma) if congested_rho is None else congested_rho
        roads.append(_uniform_road(rid, length, cells, c0, gamma, rho0, w0))
    for rid in side:
        roads.append(_uniform_road(rid, length, cells, c0, gamma, rho, a))
    for l in range(1, n + 1):
        junctions.append(Junction(
            f"m{l:02d}", (main[l - 1], side[l - 1]), (main[l],),
            ((1.0, 1.0),), (beta, 1.0 - beta)))
    boundaries.append(BoundarySpec(main[0], "start", "inflow",
                                   ((0.0, rho, b),)))
    for rid in side:
        boundaries.append(BoundarySpec(rid, "start", "inflow",
                                       ((0.0, rho, a),)))
    boundaries.append(BoundarySpec(main[-1], "end", "free_outflow"))
    return Network(gamma=gamma, roads=tuple(roads), junctions=tuple(junctions),
                   boundaries=tuple(boundaries), horizon=horizon,
                   dt_ratio=dt_ratio, output_every=output_every, scheme=scheme,
                   model=model, lwr_marker=lwr_marker)


def chain_coefficient_recursion(n: int, a: float, b: float, beta: float):
    """Closed-form homogenized markers and coefficient ratios along the chain.

    w_bar_l = beta**l * b + a * (1 - beta**l) and
    d_l = 1 + beta*(1-beta)*(a - w_bar_{l-1})**2 / (a * w_bar_{l-1}),
    with w_bar_0 = b.  Returns (w_bar[1..n], d[1..n]).
    """
    if not 0 < beta < 1:
        raise ValidationError(f"beta must lie in (0, 1), got {beta!r}")
    if a <= 0 or b <= 0:
        raise ValidationError("markers must be positive")
    w_bar = np.array([beta ** l * b + a * (1.0 - beta ** l)
                      for l in range(1, n + 1)])
    prev = np.concatenate(([b], w_bar[:-1]))
    d = 1.0 + beta * (1.0 - beta) * (a - prev) ** 2 / (a * prev)
    return w_bar, d


# ---------------------------------------------------------------------------
# exact reference solution for a merge with waves that do not reach the ends


@dataclass(frozen=True)
class MergeExactSolution:
    """Self-similar exact network solution of a 2-1 merge Riemann problem.

    Valid while no wave has reached a far road end.  The junction sits at
    the incoming roads' right ends and the outgoing road's left end.
    """

    incoming: tuple[riemann.RiemannSolution, ...]
    outgoing: riemann.RiemannSolution
    fluxes_in: tuple[float, ...]
    flux_out: float
    w_bar: float
    c_bar: float
    length: float

    def sample(self, road_index: int, x: np.ndarray, t: float):
        """(rho, w, c) at road coordinates x in [0, L].

        road_index 0/1 selects an incoming road, 2 the outgoing one.
        """
        if road_index == 2:
            return riemann.profile(self.outgoing, x, t, x0=0.0)
        return riemann.profile(self.incoming[road_index], x, t, x0=self.length)


def merge21_exact_solution(network: Network) -> MergeExactSolution:
    """Exact solution of the 2-1 merge with the network's initial data.

    The junction is resolved once on the initial states; each incoming road
    then solves a half-Riemann problem against its congested boundary state
    and the outgoing road against its free-flow entry state.
    """
    gamma = network.gamma
    junction = network.junctions[0]
    roads = {road.id: road for road in network.roads}
    states = {}
    for rid in (*junction.incoming, *junction.outgoing):
        road = roads[rid]
        seg = road.profile[0]
        states[rid] = RoadState(seg.rho, seg.w, road.c0)
    incoming_states = [states[rid] for rid in junction.incoming]
    outgoing_state = states[junction.outgoing[0]]

    shares = junction_shares(junction)[0]
    markers = np.array([st.w for st in incoming_states])
    w_bar = float(homogenized_marker(shares, markers))
    c_bar = float(pressure_coefficient(roads[junction.outgoing[0]].c0, shares,
                                       markers, gamma))
    resolution = resolve_junction(junction, incoming_states, [outgoing_state],
                                  [w_bar], [c_bar], gamma)
    inflow, outflow = resolution.inflow, resolution.outflow

    solutions = []
    for i, st in enumerate(incoming_states):
        rho_g = boundary_state(float(inflow[i]), st.w, st.c, gamma, "incoming_end")
        solutions.append(riemann.solve(st, RoadState(rho_g, st.w, st.c), gamma))
    rho_e = boundary_state(float(outflow[0]), w_bar, c_bar, gamma, "outgoing_start")
    entry = RoadState(rho_e, w_bar, c_bar)
    out_solution = riemann.solve(entry, outgoing_state, gamma)
    return MergeExactSolution(
        incoming=tuple(solutions), outgoing=out_solution,
        fluxes_in=tuple(float(q) for q in inflow), flux_out=float(outflow[0]),
        w_bar=float(w_bar), c_bar=float(c_bar),
        length=roads[junction.outgoing[0]].length)
