"""Command-line front end.

Subcommands:
  simulate   run a scenario file and write CSV results (optionally figures)
  riemann    solve one Riemann problem and print its wave structure
  oracle     tabulate the homogenized junction pressure as CSV
  scenario   emit a built-in scenario as JSON

Exit codes: 0 success, 2 invalid input, 3 numerical abort (CFL violation).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .coupling import homogenized_marker, pressure_coefficient
from .core import RoadState, ValidationError, pow_gamma
from .homogenized import build_table
from .riemann import evaluate, solve
from .scenario_io import emit_plot, parse_scenario, save_scenario, write_results
from .scheme import CflViolationError
from .simulator import run, scenario_merge21, scenario_sequential

_FMT = "%.12g"


def _floats(text: str, flag: str, count: int | None = None) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(f"{flag}: expected comma-separated numbers, got {text!r}")
    if count is not None and len(values) != count:
        raise ValidationError(f"{flag}: expected {count} values, got {len(values)}")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apnet",
        description="Finite-volume traffic simulation on merge networks "
                    "with adapted pressure coefficients.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario file")
    p_sim.add_argument("scenario", help="path to a scenario JSON file")
    p_sim.add_argument("--scheme", choices=("te", "godunov"))
    p_sim.add_argument("--model", choices=("ap", "lwr"))
    p_sim.add_argument("--dx", type=float, help="re-grid all roads to this cell size")
    p_sim.add_argument("--dt-ratio", type=float, help="dt = ratio * min dx")
    p_sim.add_argument("--out", default="results", help="output directory")
    p_sim.add_argument("--emit-plot", action="store_true",
                       help="also write plot scripts and rendered PNG figures")

    p_rie = sub.add_parser("riemann", help="solve one Riemann problem")
    p_rie.add_argument("--left", required=True, metavar="RHO,W,C")
    p_rie.add_argument("--right", required=True, metavar="RHO,W,C")
    p_rie.add_argument("--gamma", type=float, required=True)
    p_rie.add_argument("--time", type=float,
                       help="also print wave positions at this time")

    p_ora = sub.add_parser("oracle", help="tabulate the homogenized pressure")
    p_ora.add_argument("--beta", required=True, metavar="B1,B2,...",
                       help="merge priorities, must sum to 1")
    p_ora.add_argument("--w", required=True, metavar="W1,W2,...",
                       help="incoming markers")
    p_ora.add_argument("--c0", type=float, required=True)
    p_ora.add_argument("--gamma", type=float, required=True)
    p_ora.add_argument("--size", type=int, default=201,
                       help="number of table rows (default 201)")
    p_ora.add_argument("--out", help="directory for oracle.csv and the plot "
                                     "script instead of stdout")

    p_sce = sub.add_parser("scenario", help="emit a built-in scenario")
    p_sce.add_argument("name", choices=("merge21", "sequential"))
    p_sce.add_argument("--emit", action="store_true",
                       help="print the scenario JSON to stdout")
    p_sce.add_argument("--out", help="write the scenario JSON to this file")
    p_sce.add_argument("--n", type=int, default=10, help="sequential: junction count")
    p_sce.add_argument("--a", type=float, default=2.0, help="sequential: side marker")
    p_sce.add_argument("--b", type=float, default=1.0, help="sequential: root marker")
    p_sce.add_argument("--beta", type=float, default=0.5, help="merge priority")
    p_sce.add_argument("--rho", type=float, default=0.3, help="sequential: density")
    p_sce.add_argument("--congested", action="store_true",
                       help="sequential: jam the last road")
    p_sce.add_argument("--congested-rho", type=float,
                       help="sequential: density on the jammed last road")
    p_sce.add_argument("--incoming1", metavar="RHO,W", default="3,2")
    p_sce.add_argument("--incoming2", metavar="RHO,W", default="2,1")
    p_sce.add_argument("--outgoing", metavar="RHO,W", default="3,2")
    p_sce.add_argument("--c0", type=float, default=1.0)
    p_sce.add_argument("--gamma", type=float, default=1.0)
    p_sce.add_argument("--cells", type=int)
    p_sce.add_argument("--length", type=float)
    p_sce.add_argument("--horizon", type=float)
    p_sce.add_argument("--dt-ratio", type=float)
    p_sce.add_argument("--scheme", choices=("te", "godunov"), default="te")
    p_sce.add_argument("--model", choices=("ap", "lwr"), default="ap")
    p_sce.add_argument("--lwr-marker", type=float)
    return parser


def _cmd_simulate(args) -> int:
    network = parse_scenario(
        args.scenario, scheme=args.scheme, model=args.model,
        dx=args.dx, dt_ratio=args.dt_ratio)
    record = run(network)
    out = Path(args.out)
    paths = write_results(record, out)
    if args.emit_plot:
        from . import plots

        for kind, stem in (("profile", "profile"), ("marker", "marker")):
            (out / f"plot_{stem}.py").write_text(emit_plot(kind))
        plots.save_figure(plots.profile_figure(record), out / "profile.png")
        plots.save_figure(plots.marker_figure(record), out / "marker.png")
    print(f"simulated t = 0 .. {record.times[-1]:g} "
          f"({int(record.diagnostics['steps'])} steps, "
          f"{len(record.events)} junction events)")
    for name in ("fields", "events", "summary"):
        print(f"wrote {paths[name]}")
    if args.emit_plot:
        print(f"wrote {out / 'profile.png'}, {out / 'marker.png'} and scripts")
    return 0


def _cmd_riemann(args) -> int:
    left = RoadState(*_floats(args.left, "--left", 3))
    right = RoadState(*_floats(args.right, "--right", 3))
    sol = solve(left, right, args.gamma)
    out = [
        f"left   rho={_FMT % sol.left.rho} w={_FMT % sol.left.w} c={_FMT % sol.left.c} "
        f"v={_FMT % sol.left.velocity(args.gamma)}",
        f"star   rho={_FMT % sol.star.rho} w={_FMT % sol.star.w} c={_FMT % sol.star.c} "
        f"v={_FMT % sol.star.velocity(args.gamma)}",
        f"right  rho={_FMT % sol.right.rho} w={_FMT % sol.right.w} c={_FMT % sol.right.c} "
        f"v={_FMT % sol.right.velocity(args.gamma)}",
        f"first_wave {sol.wave_kind}",
    ]
    if sol.wave_kind == "shock":
        out.append(f"shock_speed {_FMT % sol.shock_speed}")
    elif sol.wave_kind == "rarefaction":
        lo, hi = sol.fan_range
        out.append(f"fan_range {_FMT % lo} {_FMT % hi}")
    out.append(f"contact_speed {_FMT % sol.contact_speed}")
    out.append(f"vacuum {'yes' if sol.has_vacuum else 'no'}")
    if args.time is not None:
        t = args.time
        if t <= 0:
            raise ValidationError(f"--time must be positive, got {t!r}")
        xs = []
        if sol.wave_kind == "shock":
            xs.append(("shock_at", sol.shock_speed * t))
        elif sol.wave_kind == "rarefaction":
            xs.append(("fan_from", sol.fan_range[0] * t))
            xs.append(("fan_to", sol.fan_range[1] * t))
        xs.append(("contact_at", sol.contact_speed * t))
        out.append(f"positions t={_FMT % t} " +
                   " ".join(f"{k}={_FMT % x}" for k, x in xs))
        probes = sorted({0.0, *(x for _, x in xs)})
        mids = [0.5 * (a + b) for a, b in zip(probes, probes[1:])]
        for x in mids:
            st = evaluate(sol, x / t)
            out.append(f"state_at x={_FMT % x} rho={_FMT % st.rho} "
                       f"w={_FMT % st.w} c={_FMT % st.c}")
    print("\n".join(out))
    return 0


def _cmd_oracle(args) -> int:
    beta = _floats(args.beta, "--beta")
    markers = _floats(args.w, "--w")
    if len(beta) != len(markers):
        raise ValidationError(
            f"--beta has {len(beta)} entries but --w has {len(markers)}")
    table = build_table(beta, markers, args.c0, args.gamma, size=args.size)
    w_bar = homogenized_marker(beta, markers)
    c_bar = pressure_coefficient(args.c0, beta, markers, args.gamma)
    lines = [
        f"# w_bar = {_FMT % w_bar}",
        f"# c_bar = {_FMT % c_bar}",
        f"# c0 = {_FMT % args.c0}",
        f"# gamma = {_FMT % args.gamma}",
        "rho,p_star,p_star_star,abs_error",
    ]
    # ascending density reads better than the table's native velocity order
    order = np.argsort(table.rho)
    for k in order:
        rho = table.rho[k]
        p_star = table.p_star[k]
        p_approx = c_bar * pow_gamma(rho, args.gamma)
        lines.append(
            f"{_FMT % rho},{_FMT % p_star},{_FMT % p_approx},"
            f"{_FMT % abs(p_star - p_approx)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "oracle.csv").write_text(text)
        (out / "plot_pressure.py").write_text(emit_plot("pressure-comparison"))
        print(f"wrote {out / 'oracle.csv'} and plot script")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_scenario(args) -> int:
    if args.name == "sequential":
        kwargs = dict(n=args.n, a=args.a, b=args.b, beta=args.beta,
                      rho=args.rho, c0=args.c0, gamma=args.gamma,
                      congested=args.congested, congested_rho=args.congested_rho,
                      scheme=args.scheme, model=args.model,
                      lwr_marker=args.lwr_marker)
        for name in ("cells", "length", "horizon", "dt_ratio"):
            value = getattr(args, name)
            if value is not None:
                kwargs[name] = value
        network = scenario_sequential(**kwargs)
    else:
        kwargs = dict(incoming1=_floats(args.incoming1, "--incoming1", 2),
                      incoming2=_floats(args.incoming2, "--incoming2", 2),
                      outgoing=_floats(args.outgoing, "--outgoing", 2),
                      c0=(args.c0,) * 3, beta=args.beta, gamma=args.gamma,
                      scheme=args.scheme, model=args.model,
                      lwr_marker=args.lwr_marker)
        for name in ("cells", "length", "horizon", "dt_ratio"):
            value = getattr(args, name)
            if value is not None:
                kwargs[name] = value
        network = scenario_merge21(**kwargs)
    if args.out:
        path = save_scenario(network, args.out)
        print(f"wrote {path}")
    elif args.emit:
        from .scenario_io import emit_scenario

        json.dump(emit_scenario(network), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        print(f"{args.name}: {len(network.roads)} roads, "
              f"{len(network.junctions)} junctions, horizon {network.horizon:g} "
              f"(use --emit or --out to export)")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "riemann": _cmd_riemann,
        "oracle": _cmd_oracle,
        "scenario": _cmd_scenario,
    }
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CflViolationError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
