"""Finite-volume simulation of second-order traffic flow on road networks.

The model transports a driver marker w and a pressure coefficient c with
the flow; merging junctions restart the outgoing road with a homogenized
marker and an adapted coefficient.  The package bundles an exact Riemann
solver, demand/supply junction coupling, a sampling-based scheme that keeps
markers sharp, a classical Godunov scheme, a scalar first-order baseline,
and a numerical reference for the homogenized pressure law.
"""

from .core import (
    VACUUM_RHO,
    InitialSegment,
    Junction,
    NegativeVelocityWarning,
    PressureLaw,
    Road,
    RoadState,
    ValidationError,
    critical_density,
    eigenvalues,
    flux,
    from_conservative,
    to_conservative,
    velocity,
)
from .coupling import (
    JunctionResolution,
    boundary_state,
    demand_ap,
    density_at_velocity,
    demand_lwr,
    homogenized_marker,
    junction_shares,
    max_flux,
    maximize_junction_flux,
    pressure_coefficient,
    resolve_junction,
    supply_ap,
    supply_lwr,
)
from .homogenized import HomogenizedPressureTable, build_table, eval_pstar, tau
from .riemann import RiemannSolution, evaluate, profile, solve
from .scheme import (
    BoundaryData,
    CflCheck,
    CflViolationError,
    GridRoad,
    LwrBoundary,
    LwrGridRoad,
    check_cfl,
    godunov_flux,
    godunov_step,
    lwr_godunov_step,
    te_step,
    van_der_corput,
)
from .scenario_io import (
    PLOT_KINDS,
    emit_plot,
    emit_scenario,
    parse_scenario,
    save_scenario,
    write_results,
)
from .simulator import (
    BoundarySpec,
    JunctionEvent,
    MergeExactSolution,
    Network,
    SimulationRecord,
    chain_coefficient_recursion,
    detect_adaption,
    jam_density,
    merge21_exact_solution,
    run,
    scenario_merge21,
    scenario_sequential,
)

__version__ = "0.1.0"

__all__ = [
    "VACUUM_RHO",
    "InitialSegment",
    "Junction",
    "NegativeVelocityWarning",
    "PressureLaw",
    "Road",
    "RoadState",
    "ValidationError",
    "critical_density",
    "eigenvalues",
    "flux",
    "from_conservative",
    "to_conservative",
    "velocity",
    "JunctionResolution",
    "boundary_state",
    "demand_ap",
    "density_at_velocity",
    "demand_lwr",
    "homogenized_marker",
    "junction_shares",
    "max_flux",
    "maximize_junction_flux",
    "pressure_coefficient",
    "resolve_junction",
    "supply_ap",
    "supply_lwr",
    "HomogenizedPressureTable",
    "build_table",
    "eval_pstar",
    "tau",
    "RiemannSolution",
    "evaluate",
    "profile",
    "solve",
    "BoundaryData",
    "CflCheck",
    "CflViolationError",
    "GridRoad",
    "LwrBoundary",
    "LwrGridRoad",
    "check_cfl",
    "godunov_flux",
    "godunov_step",
    "lwr_godunov_step",
    "te_step",
    "van_der_corput",
    "BoundarySpec",
    "JunctionEvent",
    "MergeExactSolution",
    "Network",
    "SimulationRecord",
    "chain_coefficient_recursion",
    "detect_adaption",
    "jam_density",
    "merge21_exact_solution",
    "run",
    "scenario_merge21",
    "scenario_sequential",
    "PLOT_KINDS",
    "emit_plot",
    "emit_scenario",
    "parse_scenario",
    "save_scenario",
    "write_results",
    "__version__",
]
