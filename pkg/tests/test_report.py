import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from rabiq import Axis, ModelParams, NonRectangularGrid, SweepSpec, TruncationPolicy, compute_observables, ground_state, run_sweep
from rabiq.analytic import boundary_curve, boundary_lowfreq
from rabiq.observables import ObservableSet
from rabiq.report import (
    CSV_COLUMNS,
    HeatmapStyle,
    default_style,
    diagram_csv,
    diverging_color,
    read_csv,
    render_heatmap_svg,
    sequential_color,
    write_boundary_csv,
    write_csv,
    write_solution_json,
)
from rabiq.sweep import PhaseDiagram, SweepPoint
from rabiq.wavefunction import BranchClass

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def small():
    p = ModelParams(omega=0.1)
    spec = SweepSpec(axis1=Axis("g1", 0.0, 2 * p.g_s, 9), axis2=Axis("g2", -0.8 * p.g_t, 0.8 * p.g_t, 9), fixed=p)
    return run_sweep(spec)


def _synthetic(n1, n2, value=0.25):
    p = ModelParams(omega=0.1)
    spec = SweepSpec(axis1=Axis("g1", 0.0, 1.0, n1), axis2=Axis("g2", 0.0, 0.01, n2), fixed=p)
    obs = ObservableSet(value, -0.5, 1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.5, None, None, True)
    rows = tuple(
        SweepPoint(index=idx, params=q, energy=-0.5, gap=0.1, observables=obs,
                   branch=BranchClass("single", 1, 0.0, (0.0,)), n_max_used=32, degenerate=False)
        for idx, q in spec.grid()
    )
    return PhaseDiagram(spec, rows)


def test_single_point_csv():
    p = ModelParams(omega=0.1)
    d = run_sweep(SweepSpec(axis1=Axis("g1", 0.0, 0.01, 2), fixed=p))
    text = diagram_csv(d)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 3
    assert rows[1][CSV_COLUMNS.index("branch")] == "single"
    assert rows[1][CSV_COLUMNS.index("degenerate")] == "false"
    assert rows[1][CSV_COLUMNS.index("x_tilde_plus")] == ""


def test_round_trip_exact(small):
    parsed = read_csv(io.StringIO(diagram_csv(small)))
    assert len(parsed) == len(small.rows)
    for rec, row in zip(parsed, small.rows):
        assert rec["g1"] == row.params.g1
        assert rec["energy"] == row.energy
        assert rec["sigma_z"] == row.observables.sigma_z
        assert rec["tpp_corr"] == row.observables.tpp_correlation
        assert rec["n_max_used"] == row.n_max_used
        assert rec["branch"] == row.branch.label


def test_row_count_for_81_by_81():
    assert diagram_csv(_synthetic(81, 81)).count("\r\n") == 6562


def test_error_rows(tmp_path):
    p = ModelParams(omega=0.1)
    d = run_sweep(SweepSpec(axis1=Axis("g2", 0.9 * p.g_t, 1.1 * p.g_t, 3), fixed=p))
    path = tmp_path / "e.csv"
    n = write_csv(d, path)
    assert n == path.stat().st_size
    recs = read_csv(path)
    assert "error" in recs[0]
    bad = recs[-1]
    assert bad["error"] and "spectral collapse" in bad["error"]
    assert bad["g1"] == 0.0 and bad["energy"] is None and bad["branch"] is None
    assert recs[0]["error"] is None and recs[0]["energy"] is not None


def test_observable_selector_blanks_columns():
    p = ModelParams(omega=0.1)
    d = run_sweep(SweepSpec(axis1=Axis("g1", 0.0, 0.01, 2), fixed=p, observables=("sigma_z",)))
    rec = read_csv(io.StringIO(diagram_csv(d)))[0]
    assert rec["sigma_z"] is not None
    assert rec["sigma_x"] is None and rec["branch"] is None
    assert rec["energy"] is not None


def test_boundary_csv_kind_column():
    text = io.StringIO()
    write_boundary_csv([boundary_curve("II", 0.1, values=np.linspace(1.1, 2.0, 50))], text)
    recs = read_csv(io.StringIO(text.getvalue()))
    assert len(recs) == 50
    assert all(r["kind"] == "II" for r in recs)
    g_s, g_t = math.sqrt(0.1) / 2, 0.05
    gb1 = np.array([r["g1"] / g_s for r in recs])
    log_gb2 = np.log([r["g2_tilde"] / g_t for r in recs])
    assert math.exp(np.interp(1.5, gb1, log_gb2)) == pytest.approx(1.91e-4, rel=0.01)


def test_solution_json():
    sol = ground_state(ModelParams(omega=0.001))
    buf = io.StringIO()
    write_solution_json(sol, compute_observables(sol), buf)
    doc = json.loads(buf.getvalue())
    assert doc["energy"] == -0.5 and doc["sigma_x"] == pytest.approx(-1.0)
    assert "coeffs" not in doc
    assert doc["energy"] == sol.energy and doc["gap"] == sol.gap
    assert list(doc)[:3] == ["params", "energy", "excited_energy"]


def test_coefficient_dump_size():
    sol = ground_state(ModelParams.from_reduced(0.1, 1.0, 0.2), TruncationPolicy(n_fixed=100))
    buf = io.StringIO()
    write_solution_json(sol, compute_observables(sol), buf, include_coeffs=True)
    doc = json.loads(buf.getvalue())
    assert len(doc["coeffs"]) == 202
    assert np.array_equal(np.array(doc["coeffs"]), sol.coeffs)


def test_colormaps():
    assert diverging_color(-1) == "#2166ac"
    assert diverging_color(0) == "#f7f7f7"
    assert diverging_color(1) == "#b2182b"
    assert diverging_color(5) == diverging_color(1)
    assert diverging_color(float("nan")) == "#bdbdbd"
    assert sequential_color(0, 0, 1) == "#ffffff"
    assert sequential_color(1, 0, 1) == "#08306b"
    # halfway along the lower leg: channels interpolate linearly
    mid = diverging_color(-0.5)
    r, g, b = (int(mid[k:k + 2], 16) for k in (1, 3, 5))
    assert abs(r - (33 + 247) / 2) <= 1 and abs(g - (102 + 247) / 2) <= 1 and abs(b - (172 + 247) / 2) <= 1


def _parse_svg(text):
    root = ET.fromstring(text.encode())
    assert root.tag == SVG_NS + "svg"
    assert root.get("version") == "1.1"
    return root


def test_svg_structure(small):
    text = render_heatmap_svg(small, "sigma_z", default_style("sigma_z", overlay=(boundary_curve("LowFreq", 0.1),)))
    root = _parse_svg(text)
    cells = root.find(f"{SVG_NS}g[@id='cells']")
    assert len(cells.findall(f"{SVG_NS}rect")) == 81
    assert root.find(f"{SVG_NS}g[@id='overlays']/{SVG_NS}path") is not None
    labels = "".join(t.text or "" for t in root.iter(SVG_NS + "text"))
    assert "g_s" in labels or "gs" in labels
    assert text == render_heatmap_svg(small, "sigma_z", default_style("sigma_z", overlay=(boundary_curve("LowFreq", 0.1),)))


def test_constant_field_single_color():
    root = _parse_svg(render_heatmap_svg(_synthetic(5, 4), "sigma_z"))
    fills = {r.get("fill") for r in root.find(f"{SVG_NS}g[@id='cells']")}
    assert fills == {diverging_color(0.25)}


def test_sigma_z_map_antisymmetric(small):
    sz = small.field("sigma_z")
    assert np.allclose(sz, -sz[:, ::-1], atol=1e-8)
    root = _parse_svg(render_heatmap_svg(small, "sigma_z"))
    rects = root.find(f"{SVG_NS}g[@id='cells']").findall(f"{SVG_NS}rect")
    fill = np.array([r.get("fill") for r in rects]).reshape(9, 9)
    mid = fill[:, 4]
    assert all(f == diverging_color(0.0) for f in mid)


def test_one_axis_diagram_rejected():
    p = ModelParams(omega=0.1)
    d = run_sweep(SweepSpec(axis1=Axis("g1", 0.0, 0.01, 2), fixed=p))
    with pytest.raises(NonRectangularGrid):
        render_heatmap_svg(d, "sigma_z")


def test_style_validation():
    with pytest.raises(ValueError):
        HeatmapStyle(colormap="rainbow")


def test_lowfreq_overlay_within_one_cell():
    p = ModelParams(omega=0.001)
    ratios = (-0.8, -0.4, 0.2, 0.6)
    spec = SweepSpec(
        axis1=Axis("g1", 0.0, 2 * p.g_s, 41),
        axis2=Axis("g2", ratios[0] * p.g_t, ratios[-1] * p.g_t, 2),
        fixed=p,
        observables=("sigma_z",),
    )
    g1 = spec.axis1.values()
    step = g1[1] - g1[0]
    for r in ratios:
        line = SweepSpec(axis1=spec.axis1, fixed=p.replace(g2=r * p.g_t), observables=("sigma_z",))
        sz = run_sweep(line).field("sigma_z")
        first = int(np.argmax(np.abs(sz) > 0.1))
        g1c = boundary_lowfreq(0.001, 1.0, 0.0, r * p.g_t)
        assert abs(g1[first] - g1c) <= 1.0 * step + 1e-15
