"""Scenario parsing, emission round-trips, result files, plot scripts."""

import filecmp
import json

import numpy as np
import pytest

from apnet import (
    PLOT_KINDS,
    ValidationError,
    emit_plot,
    emit_scenario,
    parse_scenario,
    run,
    save_scenario,
    scenario_merge21,
    scenario_sequential,
    write_results,
)


def _small_doc():
    return {
        "gamma": 1.0,
        "time": {"horizon": 0.2, "dt_ratio": 0.2, "output_every": 5},
        "roads": [
            {"id": "a", "length": 1.0, "cells": 20, "c0": 1.0,
             "init": [{"rho": 0.3, "w": 2.0}]},
        ],
        "boundaries": [
            {"road": "a", "end": "start", "type": "inflow",
             "series": [{"t": 0.0, "rho": 0.3, "w": 2.0}]},
            {"road": "a", "end": "end", "type": "free_outflow"},
        ],
    }


def test_parse_minimal_document():
    net = parse_scenario(_small_doc())
    assert net.gamma == 1.0
    assert net.scheme == "te"
    assert net.model == "ap"
    assert net.horizon == 0.2
    assert net.roads[0].cells == 20


def test_parse_error_locations():
    doc = _small_doc()
    del doc["gamma"]
    with pytest.raises(ValidationError, match="missing required key 'gamma'"):
        parse_scenario(doc)

    doc = _small_doc()
    doc["roads"] = []
    with pytest.raises(ValidationError, match="roads list is empty"):
        parse_scenario(doc)

    doc = _small_doc()
    doc["roads"][0]["init"] = [{"rho": 0.3, "w": 2.0}, {"rho": 0.5, "w": 2.0}]
    with pytest.raises(ValidationError,
                       match=r"only the last init piece may omit x_end \(piece 0\)"):
        parse_scenario(doc)

    doc = _small_doc()
    doc["junctions"] = [{"id": "j", "incoming": ["a"], "outgoing": ["ghost"],
                         "priorities": [1.0], "distribution": [[1.0]]}]
    with pytest.raises(ValidationError,
                       match="junction 'j': unknown outgoing road 'ghost'"):
        parse_scenario(doc)

    doc = _small_doc()
    doc["model"] = "lwr"
    with pytest.raises(ValidationError, match="needs a top-level lwr_marker"):
        parse_scenario(doc)


def test_parse_junction_priority_sum_names_junction():
    doc = _small_doc()
    doc["roads"].append({"id": "b", "length": 1.0, "cells": 20, "c0": 1.0,
                         "init": [{"rho": 0.3, "w": 2.0}]})
    doc["roads"].append({"id": "out", "length": 1.0, "cells": 20, "c0": 1.0,
                         "init": [{"rho": 0.3, "w": 2.0}]})
    doc["junctions"] = [{"id": "m", "incoming": ["a", "b"], "outgoing": ["out"],
                         "priorities": [0.5, 0.7],
                         "distribution": [[1.0, 1.0]]}]
    doc["boundaries"] = [
        {"road": "a", "end": "start", "type": "inflow",
         "series": [{"t": 0.0, "rho": 0.3, "w": 2.0}]},
        {"road": "b", "end": "start", "type": "inflow",
         "series": [{"t": 0.0, "rho": 0.3, "w": 2.0}]},
        {"road": "out", "end": "end", "type": "free_outflow"},
    ]
    with pytest.raises(ValidationError, match="m"):
        parse_scenario(doc)


def test_parse_bad_paths(tmp_path):
    with pytest.raises(ValidationError, match="cannot read"):
        parse_scenario(tmp_path / "missing.json")
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    with pytest.raises(ValidationError, match="invalid JSON"):
        parse_scenario(bad)


def test_emit_parse_round_trip_sequential():
    net = scenario_sequential(n=3, cells=10, horizon=0.5)
    clone = parse_scenario(emit_scenario(net))
    assert emit_scenario(clone) == emit_scenario(net)


def test_emit_parse_round_trip_merge(tmp_path):
    net = scenario_merge21(incoming1=(0.4, 2.0), incoming2=(0.5, 1.5),
                           outgoing=(0.3, 2.0), cells=10)
    path = save_scenario(net, tmp_path / "merge.json")
    clone = parse_scenario(path)
    assert emit_scenario(clone) == emit_scenario(net)
    # saved files are valid JSON with sorted keys
    doc = json.loads(path.read_text())
    assert list(doc) == sorted(doc)


def test_parse_overrides():
    doc = _small_doc()
    net = parse_scenario(doc, scheme="godunov", dt_ratio=0.1, dx=0.25)
    assert net.scheme == "godunov"
    assert net.dt_ratio == 0.1
    assert net.roads[0].cells == 4

    doc = _small_doc()
    doc["lwr_marker"] = 2.0
    doc["scheme"] = "godunov"
    net = parse_scenario(doc, model="lwr")
    assert net.model == "lwr"
    assert net.lwr_marker == 2.0


def test_write_results_files(tmp_path):
    net = scenario_merge21(incoming1=(0.4, 2.0), incoming2=(0.5, 1.5),
                           outgoing=(0.3, 2.0), cells=10, horizon=0.06)
    record = run(net)
    paths = write_results(record, tmp_path / "out")

    fields = paths["fields"].read_text().splitlines()
    assert fields[0] == "t,road_id,cell_index,x_center,rho,v,w,c"
    first = fields[1].split(",")
    assert first[0] == "0"
    assert first[1] == "in_1"          # road ids sorted within each time
    assert first[2] == "0"
    assert float(first[4]) == 0.4
    n_roads, cells = 3, 10
    assert (len(fields) - 1) % (n_roads * cells) == 0

    events = paths["events"].read_text().splitlines()
    assert events[0] == "junction_id,t_star,w_bar_old,w_bar_new,coeff_ratio"
    assert len(events) == 2
    junction_id, t_star, w_old, w_new, ratio = events[1].split(",")
    assert junction_id == "merge"
    assert t_star == "0"
    # 12 significant digits survive the round-trip to about 1e-11
    assert float(ratio) == pytest.approx(49.0 / 48.0, rel=1e-11)

    summary = json.loads(paths["summary"].read_text())
    assert set(summary) == {"grid", "time", "conservation", "events",
                            "runtime_seconds"}
    assert summary["grid"]["out"]["cells"] == 10
    assert summary["grid"]["out"]["dx"] == pytest.approx(0.1)
    assert summary["events"] == 1
    assert summary["conservation"]["junction_mass_error"] <= 1e-12


def test_twelve_digit_field_format(tmp_path):
    net = scenario_merge21(incoming1=(0.4, 2.0), incoming2=(0.5, 1.5),
                           outgoing=(0.3, 2.0), cells=10, horizon=0.06)
    record = run(net)
    paths = write_results(record, tmp_path)
    row = paths["events"].read_text().splitlines()[1].split(",")
    assert row[4] == "%.12g" % (49.0 / 48.0)


def test_results_are_byte_deterministic(tmp_path):
    net = scenario_sequential(n=2, cells=15, horizon=0.4, output_every=10)
    a = write_results(run(net), tmp_path / "a")
    b = write_results(run(net), tmp_path / "b")
    assert filecmp.cmp(a["fields"], b["fields"], shallow=False)
    assert filecmp.cmp(a["events"], b["events"], shallow=False)


def test_emit_plot_kinds():
    assert set(PLOT_KINDS) == {"profile", "marker", "pressure-comparison"}
    for kind in PLOT_KINDS:
        text = emit_plot(kind)
        assert "matplotlib" in text
        compile(text, f"plot_{kind}.py", "exec")
    with pytest.raises(ValidationError, match="marker"):
        emit_plot("heatmap")
