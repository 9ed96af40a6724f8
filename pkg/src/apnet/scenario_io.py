"""Scenario files, result serialization, and plot-script emission.

A scenario is a JSON document with the following shape (see also the files
under scenarios/):

    {
      "gamma": 1.0,
      "scheme": "te",                  // "te" | "godunov", default "te"
      "model": "ap",                   // "ap" | "lwr", default "ap"
      "lwr_marker": 2.0,               // required iff model == "lwr"
      "time": {"horizon": 12.0, "dt_ratio": 0.25, "output_every": 40},
      "roads": [
        {"id": "road_00", "length": 0.5, "cells": 50, "c0": 1.0,
         "init": [{"rho": 0.3, "w": 1.0}]}
      ],
      "junctions": [
        {"id": "m01", "incoming": ["road_00", "side_01"],
         "outgoing": ["road_01"],
         "priorities": [0.5, 0.5], "distribution": [[1.0, 1.0]]}
      ],
      "boundaries": [
        {"road": "road_00", "end": "start", "type": "inflow",
         "series": [{"t": 0.0, "rho": 0.3, "w": 1.0}]},
        {"road": "road_10", "end": "end", "type": "free_outflow"}
      ]
    }

Road init lists are piecewise constant; every piece except the last needs an
"x_end" breakpoint, the last one defaults to the road length.  distribution
rows are indexed by outgoing road, columns by incoming road.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import (InitialSegment, Junction, PressureLaw, Road,
                   ValidationError)
from .simulator import BoundarySpec, Network, SimulationRecord

__all__ = [
    "parse_scenario",
    "emit_scenario",
    "save_scenario",
    "write_results",
    "emit_plot",
    "PLOT_KINDS",
]

_FMT = "%.12g"


def _require(mapping, key, where):
    if not isinstance(mapping, dict):
        raise ValidationError(f"{where}: expected an object, got {type(mapping).__name__}")
    if key not in mapping:
        raise ValidationError(f"{where}: missing required key {key!r}")
    return mapping[key]


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _string(value, where):
    if not isinstance(value, str):
        raise ValidationError(f"{where}: expected a string, got {value!r}")
    return value


def _load_document(source):
    if isinstance(source, dict):
        return source, "scenario"
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"scenario {path}: cannot read ({exc})") from exc
    try:
        return json.loads(text), f"scenario {path.name}"
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario {path}: invalid JSON ({exc})") from exc


def _parse_road(entry, gamma, where, dx_override):
    rid = _string(_require(entry, "id", where), f"{where}.id")
    where = f"road {rid!r}"
    length = _number(_require(entry, "length", where), f"{where}: length")
    cells = _integer(_require(entry, "cells", where), f"{where}: cells")
    c0 = _number(_require(entry, "c0", where), f"{where}: c0")
    pieces = _require(entry, "init", where)
    if not isinstance(pieces, list) or not pieces:
        raise ValidationError(f"{where}: init must be a non-empty list")
    segments = []
    for k, piece in enumerate(pieces):
        rho = _number(_require(piece, "rho", f"{where} init[{k}]"), f"{where} init[{k}].rho")
        w = _number(_require(piece, "w", f"{where} init[{k}]"), f"{where} init[{k}].w")
        if "x_end" in piece:
            x_end = _number(piece["x_end"], f"{where} init[{k}].x_end")
        elif k == len(pieces) - 1:
            x_end = length
        else:
            raise ValidationError(
                f"{where}: only the last init piece may omit x_end (piece {k})")
        segments.append(InitialSegment(x_end=x_end, rho=rho, w=w))
    if dx_override is not None:
        cells = max(1, round(length / dx_override))
    return Road(id=rid, length=length, cells=cells,
                pressure=PressureLaw(c0, gamma), profile=tuple(segments))


def _parse_junction(entry, road_ids, where):
    jid = _string(_require(entry, "id", where), f"{where}.id")
    where = f"junction {jid!r}"
    incoming = _require(entry, "incoming", where)
    outgoing = _require(entry, "outgoing", where)
    for group, name in ((incoming, "incoming"), (outgoing, "outgoing")):
        if not isinstance(group, list) or not group:
            raise ValidationError(f"{where}: {name} must be a non-empty list")
        for rid in group:
            if rid not in road_ids:
                raise ValidationError(f"{where}: unknown {name} road {rid!r}")
    priorities = _require(entry, "priorities", where)
    distribution = _require(entry, "distribution", where)
    if not isinstance(distribution, list) or not all(
            isinstance(row, list) for row in distribution):
        raise ValidationError(f"{where}: distribution must be a list of rows")
    return Junction(
        id=jid,
        incoming=tuple(_string(r, f"{where}.incoming") for r in incoming),
        outgoing=tuple(_string(r, f"{where}.outgoing") for r in outgoing),
        distribution=tuple(tuple(_number(a, f"{where}.distribution") for a in row)
                           for row in distribution),
        priorities=tuple(_number(b, f"{where}.priorities") for b in priorities),
    )


def _parse_boundary(entry, road_ids, where):
    road = _string(_require(entry, "road", where), f"{where}.road")
    if road not in road_ids:
        raise ValidationError(f"{where}: unknown road {road!r}")
    where = f"boundary on {road!r}"
    end = _string(_require(entry, "end", where), f"{where}.end")
    kind = _string(_require(entry, "type", where), f"{where}.type")
    series = ()
    if "series" in entry:
        raw = entry["series"]
        if not isinstance(raw, list):
            raise ValidationError(f"{where}: series must be a list")
        series = tuple(
            (_number(_require(item, "t", f"{where} series[{k}]"), f"{where} series[{k}].t"),
             _number(_require(item, "rho", f"{where} series[{k}]"), f"{where} series[{k}].rho"),
             _number(_require(item, "w", f"{where} series[{k}]"), f"{where} series[{k}].w"))
            for k, item in enumerate(raw))
    return BoundarySpec(road=road, end=end, kind=kind, series=series)


def parse_scenario(source, *, scheme=None, model=None, dx=None,
                   dt_ratio=None) -> Network:
    """Build a Network from a scenario file, path, or parsed document.

    Keyword overrides replace the corresponding document entries; dx
    re-grids every road to cells = round(length / dx).
    """
    doc, where = _load_document(source)
    gamma = _number(_require(doc, "gamma", where), f"{where}: gamma")

    time_block = _require(doc, "time", where)
    horizon = _number(_require(time_block, "horizon", f"{where}: time"),
                      f"{where}: time.horizon")
    ratio = _number(time_block.get("dt_ratio", 0.25), f"{where}: time.dt_ratio")
    cadence = _integer(time_block.get("output_every", 1), f"{where}: time.output_every")

    roads_raw = _require(doc, "roads", where)
    if not isinstance(roads_raw, list) or not roads_raw:
        raise ValidationError(f"{where}: roads list is empty")
    roads = tuple(_parse_road(entry, gamma, f"{where}: roads[{k}]", dx)
                  for k, entry in enumerate(roads_raw))
    road_ids = {road.id for road in roads}

    junctions_raw = doc.get("junctions", [])
    if not isinstance(junctions_raw, list):
        raise ValidationError(f"{where}: junctions must be a list")
    junctions = tuple(_parse_junction(entry, road_ids, f"{where}: junctions[{k}]")
                      for k, entry in enumerate(junctions_raw))

    boundaries_raw = doc.get("boundaries", [])
    if not isinstance(boundaries_raw, list):
        raise ValidationError(f"{where}: boundaries must be a list")
    boundaries = tuple(_parse_boundary(entry, road_ids, f"{where}: boundaries[{k}]")
                       for k, entry in enumerate(boundaries_raw))

    chosen_model = model if model is not None else doc.get("model", "ap")
    lwr_marker = doc.get("lwr_marker")
    if chosen_model == "lwr" and lwr_marker is None:
        raise ValidationError(
            f"{where}: model 'lwr' needs a top-level lwr_marker value")

    return Network(
        gamma=gamma,
        roads=roads,
        junctions=junctions,
        boundaries=boundaries,
        horizon=horizon,
        dt_ratio=ratio if dt_ratio is None else float(dt_ratio),
        output_every=cadence,
        scheme=scheme if scheme is not None else doc.get("scheme", "te"),
        model=chosen_model,
        lwr_marker=None if lwr_marker is None else float(lwr_marker),
    )


def emit_scenario(network: Network) -> dict:
    """Scenario document equivalent to the network; parse round-trips it."""
    doc = {
        "gamma": network.gamma,
        "scheme": network.scheme,
        "model": network.model,
        "time": {
            "horizon": network.horizon,
            "dt_ratio": network.dt_ratio,
            "output_every": network.output_every,
        },
        "roads": [
            {
                "id": road.id,
                "length": road.length,
                "cells": road.cells,
                "c0": road.c0,
                "init": [
                    {"x_end": seg.x_end, "rho": seg.rho, "w": seg.w}
                    for seg in road.profile
                ],
            }
            for road in network.roads
        ],
        "junctions": [
            {
                "id": j.id,
                "incoming": list(j.incoming),
                "outgoing": list(j.outgoing),
                "priorities": list(j.priorities),
                "distribution": [list(row) for row in j.distribution],
            }
            for j in network.junctions
        ],
        "boundaries": [
            _boundary_entry(b) for b in network.boundaries
        ],
    }
    if network.lwr_marker is not None:
        doc["lwr_marker"] = network.lwr_marker
    return doc


def _boundary_entry(b: BoundarySpec) -> dict:
    entry = {"road": b.road, "end": b.end, "type": b.kind}
    if b.series:
        entry["series"] = [{"t": t, "rho": rho, "w": w} for t, rho, w in b.series]
    return entry


def save_scenario(network: Network, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(emit_scenario(network), indent=2, sort_keys=True) + "\n")
    return path


def write_results(record: SimulationRecord, out_dir) -> dict[str, Path]:
    """Write fields.csv, events.csv, and summary.json under out_dir.

    The CSV files are deterministic byte for byte across identical runs;
    summary.json contains the wall-clock time and therefore is not.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    fields_path = out / "fields.csv"
    road_ids = sorted(record.fields)
    lines = ["t,road_id,cell_index,x_center,rho,v,w,c"]
    for k, t in enumerate(record.times):
        t_txt = _FMT % t
        for rid in road_ids:
            entry = record.fields[rid]
            xs = record.x_centers[rid]
            rho, v = entry["rho"][k], entry["v"][k]
            w, c = entry["w"][k], entry["c"][k]
            for j in range(len(xs)):
                lines.append(
                    f"{t_txt},{rid},{j},{_FMT % xs[j]},{_FMT % rho[j]},"
                    f"{_FMT % v[j]},{_FMT % w[j]},{_FMT % c[j]}")
    fields_path.write_text("\n".join(lines) + "\n")

    events_path = out / "events.csv"
    lines = ["junction_id,t_star,w_bar_old,w_bar_new,coeff_ratio"]
    for e in sorted(record.events, key=lambda e: (e.time, e.junction)):
        lines.append(
            f"{e.junction},{_FMT % e.time},{_FMT % e.w_old},"
            f"{_FMT % e.w_new},{_FMT % e.ratio}")
    events_path.write_text("\n".join(lines) + "\n")

    summary_path = out / "summary.json"
    summary = {
        "grid": {
            rid: {
                "cells": int(len(record.x_centers[rid])),
                "dx": float(record.x_centers[rid][0] * 2.0),
            }
            for rid in road_ids
        },
        "time": {
            "dt": record.diagnostics.get("dt"),
            "steps": record.diagnostics.get("steps"),
            "first_output": float(record.times[0]),
            "last_output": float(record.times[-1]),
            "n_outputs": int(len(record.times)),
        },
        "conservation": {
            "junction_mass_error": record.diagnostics.get("junction_mass_error"),
            "junction_momentum_error": record.diagnostics.get("junction_momentum_error"),
        },
        "events": len(record.events),
        "runtime_seconds": record.diagnostics.get("runtime_seconds"),
    }
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    return {"fields": fields_path, "events": events_path, "summary": summary_path}


_PROFILE_SCRIPT = '''\
#!/usr/bin/env python3
"""Velocity and density profiles per road at the last output time.

Reads fields.csv (written next to this script) and saves profile.png.
"""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("fields.csv")))
t_last = rows[-1]["t"]
per_road = defaultdict(lambda: ([], [], []))
for row in rows:
    if row["t"] != t_last:
        continue
    x, rho, v = per_road[row["road_id"]]
    x.append(float(row["x_center"]))
    rho.append(float(row["rho"]))
    v.append(float(row["v"]))

fig, (ax_rho, ax_v) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
for rid in sorted(per_road):
    x, rho, v = per_road[rid]
    ax_rho.plot(x, rho, label=rid)
    ax_v.plot(x, v, label=rid)
ax_rho.set_ylabel("density")
ax_v.set_ylabel("velocity")
ax_v.set_xlabel("x")
ax_rho.set_title(f"profiles at t = {t_last}")
ax_rho.legend(fontsize="small")
fig.tight_layout()
fig.savefig("profile.png", dpi=150)
print("wrote profile.png")
'''

_MARKER_SCRIPT = '''\
#!/usr/bin/env python3
"""Lagrangian marker w along the chained roads at the last output time.

Reads fields.csv (written next to this script) and saves marker.png.
"""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("fields.csv")))
t_last = rows[-1]["t"]
per_road = defaultdict(lambda: ([], []))
for row in rows:
    if row["t"] != t_last:
        continue
    x, w = per_road[row["road_id"]]
    x.append(float(row["x_center"]))
    w.append(float(row["w"]))

fig, ax = plt.subplots(figsize=(8, 4))
offset = 0.0
for rid in sorted(per_road):
    x, w = per_road[rid]
    ax.plot([offset + xi for xi in x], w, label=rid)
    dx = x[1] - x[0] if len(x) > 1 else 2.0 * x[0]
    offset += x[-1] + dx / 2.0
ax.set_xlabel("chained x")
ax.set_ylabel("marker w")
ax.set_title(f"markers at t = {t_last}")
ax.legend(fontsize="x-small", ncol=3)
fig.tight_layout()
fig.savefig("marker.png", dpi=150)
print("wrote marker.png")
'''

_PRESSURE_SCRIPT = '''\
#!/usr/bin/env python3
"""Homogenized pressure against its closed-form approximation.

Reads oracle.csv (written next to this script) and saves pressure.png.
The leading comment lines carry the mixture constants; the initial law
c0*rho^gamma is reconstructed from them.
"""
import csv

import matplotlib.pyplot as plt

meta = {}
body = []
for line in open("oracle.csv"):
    if line.startswith("#"):
        key, _, value = line[1:].partition("=")
        meta[key.strip()] = float(value)
    else:
        body.append(line)

rho, p_star, p_approx = [], [], []
for row in csv.DictReader(body):
    rho.append(float(row["rho"]))
    p_star.append(float(row["p_star"]))
    p_approx.append(float(row["p_star_star"]))

c0, gamma = meta.get("c0", 1.0), meta.get("gamma", 1.0)
p_ref = [c0 * r ** gamma for r in rho]

fig, ax = plt.subplots(figsize=(6, 4.5))
ax.plot(rho, p_star, label="implicit pressure")
ax.plot(rho, p_approx, "--", label="approximation")
ax.plot(rho, p_ref, ":", label="initial law c0*rho^gamma")
ax.set_xlabel("density")
ax.set_ylabel("pressure")
ax.legend()
fig.tight_layout()
fig.savefig("pressure.png", dpi=150)
print("wrote pressure.png")
'''

PLOT_KINDS = {
    "profile": _PROFILE_SCRIPT,
    "marker": _MARKER_SCRIPT,
    "pressure-comparison": _PRESSURE_SCRIPT,
}


def emit_plot(kind: str) -> str:
    """Self-contained plotting script for the named output kind.

    The script expects the CSV written by write_results (or the oracle
    table) in its own directory and saves a PNG next to it.
    """
    try:
        return PLOT_KINDS[kind]
    except KeyError:
        raise ValidationError(
            f"unknown plot kind {kind!r}; valid kinds: {sorted(PLOT_KINDS)}") from None
