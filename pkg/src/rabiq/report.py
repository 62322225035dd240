"""CSV/JSON serialization and SVG heatmaps for sweeps and solutions.

All writers are deterministic: identical inputs give byte-identical output.
Floats are written in Python's shortest round-trip form (``repr``), so
reading a CSV back reproduces every number exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonRectangularGrid
from .model import derive_scales

__all__ = [
    "CSV_COLUMNS",
    "HeatmapStyle",
    "write_csv",
    "diagram_csv",
    "read_csv",
    "write_boundary_csv",
    "solution_document",
    "write_solution_json",
    "render_heatmap_svg",
    "diverging_color",
    "sequential_color",
    "default_style",
]

CSV_COLUMNS = (
    "g1", "g2", "g2_tilde", "omega", "Omega", "chi", "energy", "gap", "sigma_z", "sigma_x",
    "photon_number", "displacement", "spp_corr", "tpp_corr", "p2_ratio", "rho_plus",
    "x_tilde_plus", "x_tilde_minus", "branch", "n_max_used", "degenerate",
)
PARAM_COLUMNS = ("g1", "g2", "g2_tilde", "omega", "Omega", "chi")
# CSV column -> SweepPoint.value name
_SOURCE = {"spp_corr": "spp_correlation", "tpp_corr": "tpp_correlation"}
_INT_COLUMNS = {"n_max_used"}
_BOOL_COLUMNS = {"degenerate"}
_TEXT_COLUMNS = {"branch", "error", "kind"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _emit(text: str, destination) -> int:
    data = text.encode("utf-8")
    if destination is None:
        return len(data)
    if hasattr(destination, "write"):
        if isinstance(destination, io.TextIOBase) or hasattr(destination, "encoding"):
            destination.write(text)
        else:
            destination.write(data)
    else:
        with open(destination, "wb") as fh:
            fh.write(data)
    return len(data)


def _row_values(point, blanked) -> list:
    out = []
    for col in CSV_COLUMNS:
        name = _SOURCE.get(col, col)
        if (not point.ok and col not in PARAM_COLUMNS) or name in blanked:
            out.append("")
        else:
            out.append(_fmt(point.value(name)))
    return out


def diagram_csv(d) -> str:
    """The CSV text for a phase diagram (see :func:`write_csv`)."""
    from .sweep import OBSERVABLE_NAMES

    blanked = set()
    if d.spec.observables is not None:
        blanked = (set(OBSERVABLE_NAMES) | {"branch"}) - set(d.spec.observables)
    has_errors = any(not r.ok for r in d.rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(list(CSV_COLUMNS) + (["error"] if has_errors else []))
    for r in d.rows:
        vals = _row_values(r, blanked)
        if has_errors:
            vals.append(r.error or "")
        w.writerow(vals)
    return buf.getvalue()


def write_csv(d, destination) -> int:
    """Write a phase diagram as RFC 4180 CSV and return the byte count.

    Rows follow grid order. If any point failed, an ``error`` column is
    appended; failed rows carry only the parameter columns and the message.
    Unselected observables (``SweepSpec.observables``) are left empty.
    """
    return _emit(diagram_csv(d), destination)


def _parse(col: str, text: str):
    if text == "":
        return None
    if col in _TEXT_COLUMNS:
        return text
    if col in _BOOL_COLUMNS:
        if text not in ("true", "false"):
            raise ValueError(f"bad boolean {text!r} in column {col}")
        return text == "true"
    if col in _INT_COLUMNS:
        return int(text)
    return float(text)


def read_csv(source) -> list:
    """Parse a CSV written by this module into a list of typed dicts."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="", encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader)
    return [{c: _parse(c, v) for c, v in zip(header, row)} for row in reader]


def write_boundary_csv(curves, destination) -> int:
    """Boundary curves in the sweep CSV schema with a leading ``kind`` column."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["kind", *CSV_COLUMNS])
    for curve in curves:
        meta = curve.metadata
        chi = meta.get("chi", 0.0)
        for g1, g2t in curve.points:
            values = {
                "g1": g1, "g2": g2t / (1.0 + chi), "g2_tilde": g2t,
                "omega": meta["omega"], "Omega": meta["Omega"], "chi": chi,
            }
            w.writerow([curve.kind] + [_fmt(values.get(c)) for c in CSV_COLUMNS])
    return _emit(buf.getvalue(), destination)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def solution_document(sol, obs, include_coeffs: bool = False) -> dict:
    p = sol.params_echo
    sc = derive_scales(p)
    doc = {
        "params": {
            "omega": p.omega, "Omega": p.Omega, "g1": p.g1, "g2": p.g2, "chi": p.chi,
            "g2_tilde": p.g2_tilde, "g_s": sc.g_s, "g_t": sc.g_t, "gbar1": sc.gbar1, "gbar2": sc.gbar2,
        },
        "energy": sol.energy,
        "excited_energy": sol.excited_energy,
        "gap": sol.gap,
        "n_max_used": sol.n_max_used,
        "residual": sol.residual,
        "degenerate": sol.degenerate,
        "sector": sol.sector,
        "basis_shift": sol.basis_shift,
    }
    doc.update({
        "sigma_z": obs.sigma_z,
        "sigma_x": obs.sigma_x,
        "photon_number": obs.photon_number,
        "displacement": obs.displacement,
        "spp_corr": obs.spp_correlation,
        "tpp_corr": obs.tpp_correlation,
        "p2_ratio": obs.p2_ratio,
        "rho_plus": obs.rho_plus,
        "rho_minus": obs.rho_minus,
        "x_tilde_plus": obs.x_tilde_plus,
        "x_tilde_minus": obs.x_tilde_minus,
        "reliable": obs.reliable,
    })
    if include_coeffs:
        doc["coeff_layout"] = "index 2n+s, s=0 spin up, s=1 spin down; Fock states of a - basis_shift"
        doc["coeffs"] = [float(c) for c in sol.coeffs]
    return doc


def write_solution_json(sol, obs, destination=None, include_coeffs: bool = False) -> int:
    """Write one solution as a JSON object with a fixed key order; returns the byte count."""
    text = json.dumps(solution_document(sol, obs, include_coeffs), indent=2) + "\n"
    return _emit(text, destination)


# ---------------------------------------------------------------------------
# SVG heatmaps
# ---------------------------------------------------------------------------

_BLUE = (33, 102, 172)
_WHITE = (247, 247, 247)
_RED = (178, 24, 43)
_SEQ_LO = (255, 255, 255)
_SEQ_HI = (8, 48, 107)
_MISSING = "#bdbdbd"


def _lerp(a, b, t):
    return tuple(int(round(x + (y - x) * t)) for x, y in zip(a, b))


def _hex(rgb) -> str:
    return "#%02x%02x%02x" % rgb


def diverging_color(value: float, lo: float = -1.0, hi: float = 1.0) -> str:
    """Blue at ``lo``, near-white at the midpoint, red at ``hi``.

    With t = (clip(value) - lo) / (hi - lo): for t <= 1/2 the colour is
    blue + 2t (white - blue), above it white + (2t - 1)(red - white).
    NaN maps to grey.
    """
    if value is None or not math.isfinite(value):
        return _MISSING
    t = (min(max(value, lo), hi) - lo) / (hi - lo)
    if t <= 0.5:
        return _hex(_lerp(_BLUE, _WHITE, 2.0 * t))
    return _hex(_lerp(_WHITE, _RED, 2.0 * t - 1.0))


def sequential_color(value: float, lo: float, hi: float) -> str:
    """White at ``lo`` to dark blue at ``hi``, linear in between; NaN maps to grey."""
    if value is None or not math.isfinite(value):
        return _MISSING
    t = 0.0 if hi == lo else (min(max(value, lo), hi) - lo) / (hi - lo)
    return _hex(_lerp(_SEQ_LO, _SEQ_HI, t))


@dataclass(frozen=True)
class HeatmapStyle:
    colormap: str = "diverging"  # diverging | sequential
    width: int = 640
    height: int = 520
    overlay: tuple = ()
    domain: tuple | None = None  # (lo, hi); default [-1, 1] diverging, data range sequential
    title: str | None = None

    def __post_init__(self):
        if self.colormap not in ("diverging", "sequential"):
            raise ValueError("colormap must be 'diverging' or 'sequential'")
        if self.width < 200 or self.height < 160:
            raise ValueError("heatmap needs at least 200x160 pixels")
        object.__setattr__(self, "overlay", tuple(self.overlay))


def default_style(field_name: str, **kw) -> HeatmapStyle:
    """Diverging [-1, 1] for sign-carrying fields, sequential otherwise (sigma_x over [-1, 1])."""
    if field_name in ("sigma_z", "x_tilde_plus", "x_tilde_minus", "displacement",
                      "spp_correlation", "tpp_correlation", "spp_corr", "tpp_corr"):
        return HeatmapStyle(colormap="diverging", **kw)
    if field_name == "sigma_x":
        kw.setdefault("domain", (-1.0, 1.0))
    return HeatmapStyle(colormap="sequential", **kw)


_MARGIN = {"left": 72, "right": 96, "top": 34, "bottom": 52}
_DASH = {"LowFreq": "7,4", "I": "3,3", "II": "9,3,2,3", "NumericalI": "2,2", "NumericalII": "2,2"}


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e-2 and abs(v) < 1e4:
        return f"{v:.3g}"
    return f"{v:.1e}"


class _AxisMap:
    """Value -> pixel along one axis; cells are uniform in linear or log coordinates."""

    def __init__(self, values, scale, p0, p1, unit):
        self.scale = scale
        self.unit = unit
        u = np.asarray(values, float) / unit
        self.t = np.log10(u) if scale == "log" else u
        n = len(self.t)
        step = (self.t[-1] - self.t[0]) / (n - 1)
        self.lo = self.t[0] - step / 2
        self.hi = self.t[-1] + step / 2
        self.p0, self.p1 = p0, p1

    def __call__(self, value):
        u = value / self.unit
        if self.scale == "log":
            if u <= 0:
                return None
            u = math.log10(u)
        return self.p0 + (u - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)

    def edges(self):
        n = len(self.t)
        ts = np.linspace(self.lo, self.hi, n + 1)
        return self.p0 + (ts - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)

    def ticks(self, k=5):
        ts = np.linspace(self.lo, self.hi, k)
        vals = 10.0**ts if self.scale == "log" else ts
        pix = self.p0 + (ts - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)
        return list(zip(vals, pix))


def _unit_for(axis, d):
    p = d.spec.fixed
    swept = {a.name for a in d.spec.axes}
    if axis.name == "g1" and "omega" not in swept:
        return p.g_s, "g1 / g_s"
    if axis.name == "g2" and "omega" not in swept:
        # g2_tilde / g_t = (1 + chi) g2 / g_t
        return p.g_t / (1.0 + p.chi), "g2_tilde / g_t"
    return 1.0, axis.name


def render_heatmap_svg(d, field_name: str, style: HeatmapStyle | None = None, destination=None) -> str:
    """Standalone SVG 1.1 heatmap of one CSV column over a 2-d diagram.

    axis1 runs horizontally, axis2 vertically (increasing upwards); one
    ``rect`` per grid cell. Couplings are labelled in units of g_s (g1) and
    g_t (g2_tilde). Boundary curves in ``style.overlay`` are drawn as dashed
    paths clipped to the plot area. Returns the document text and writes it
    to ``destination`` when given.
    """
    style = style or default_style(field_name)
    if len(d.shape) != 2 or len(d.rows) != d.shape[0] * d.shape[1]:
        raise NonRectangularGrid("heatmaps need a complete two-axis grid")
    ax1, ax2 = d.spec.axes
    name = _SOURCE.get(field_name, field_name)
    values = d.field(name)
    if style.colormap == "diverging":
        lo, hi = style.domain or (-1.0, 1.0)

        def color(v):
            return diverging_color(v, lo, hi)
    else:
        finite = values[np.isfinite(values)]
        if style.domain is not None:
            lo, hi = style.domain
        elif finite.size:
            lo, hi = float(finite.min()), float(finite.max())
        else:
            lo, hi = 0.0, 1.0

        def color(v):
            return sequential_color(v, lo, hi)

    W, H = style.width, style.height
    x0, x1 = _MARGIN["left"], W - _MARGIN["right"]
    y0, y1 = H - _MARGIN["bottom"], _MARGIN["top"]
    u1, label1 = _unit_for(ax1, d)
    u2, label2 = _unit_for(ax2, d)
    mx = _AxisMap(ax1.values(), ax1.scale, x0, x1, u1)
    my = _AxisMap(ax2.values(), ax2.scale, y0, y1, u2)
    ex, ey = mx.edges(), my.edges()

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
        f"<title>{style.title or field_name}</title>",
        f'<defs><clipPath id="plot"><rect x="{_num(x0)}" y="{_num(y1)}" width="{_num(x1 - x0)}" '
        f'height="{_num(y0 - y1)}"/></clipPath></defs>',
        '<g id="cells" shape-rendering="crispEdges">',
    ]
    for i in range(d.shape[0]):
        for j in range(d.shape[1]):
            left, right = ex[i], ex[i + 1]
            top, bottom = ey[j + 1], ey[j]
            out.append(
                f'<rect x="{_num(left)}" y="{_num(top)}" width="{_num(right - left)}" '
                f'height="{_num(bottom - top)}" fill="{color(float(values[i, j]))}"/>'
            )
    out.append("</g>")

    out.append('<g id="overlays" clip-path="url(#plot)" fill="none" stroke="#000000" stroke-width="1.5">')
    for curve in style.overlay:
        pts = []
        for g1, g2t in curve.points:
            g2 = g2t / (1.0 + d.spec.fixed.chi)
            if ax1.name == "g1" and ax2.name == "g2":
                px, py = mx(g1), my(g2)
            elif ax1.name == "g2" and ax2.name == "g1":
                px, py = mx(g2), my(g1)
            else:
                raise ValueError("overlays need a g1 x g2 diagram")
            if px is not None and py is not None:
                pts.append((px, py))
        if len(pts) >= 2:
            path = "M" + " L".join(f"{_num(a)},{_num(b)}" for a, b in pts)
            dash = _DASH.get(curve.kind, "4,4")
            out.append(f'<path d="{path}" stroke-dasharray="{dash}"><title>{curve.kind}</title></path>')
    out.append("</g>")

    out.append('<g id="axes" stroke="#000000" fill="none">')
    out.append(f'<rect x="{_num(x0)}" y="{_num(y1)}" width="{_num(x1 - x0)}" height="{_num(y0 - y1)}"/>')
    for v, px in mx.ticks():
        out.append(f'<line x1="{_num(px)}" y1="{_num(y0)}" x2="{_num(px)}" y2="{_num(y0 + 5)}"/>')
    for v, py in my.ticks():
        out.append(f'<line x1="{_num(x0 - 5)}" y1="{_num(py)}" x2="{_num(x0)}" y2="{_num(py)}"/>')
    out.append("</g>")
    out.append('<g id="labels" fill="#000000">')
    for v, px in mx.ticks():
        out.append(f'<text x="{_num(px)}" y="{_num(y0 + 18)}" text-anchor="middle">{_tick(v)}</text>')
    for v, py in my.ticks():
        out.append(f'<text x="{_num(x0 - 8)}" y="{_num(py + 4)}" text-anchor="end">{_tick(v)}</text>')
    out.append(f'<text x="{_num((x0 + x1) / 2)}" y="{_num(H - 12)}" text-anchor="middle">{label1}</text>')
    out.append(
        f'<text x="16" y="{_num((y0 + y1) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_num((y0 + y1) / 2)})">{label2}</text>'
    )
    out.append(f'<text x="{_num((x0 + x1) / 2)}" y="20" text-anchor="middle">{style.title or field_name}</text>')
    out.append("</g>")

    # colour bar
    cb_x = x1 + 22
    n_steps = 64
    out.append('<g id="colorbar" shape-rendering="crispEdges">')
    for k in range(n_steps):
        v = lo + (hi - lo) * (k + 0.5) / n_steps
        top = y0 - (y0 - y1) * (k + 1) / n_steps
        out.append(
            f'<rect x="{_num(cb_x)}" y="{_num(top)}" width="14" height="{_num((y0 - y1) / n_steps)}" '
            f'fill="{color(v)}"/>'
        )
    out.append(f'<rect x="{_num(cb_x)}" y="{_num(y1)}" width="14" height="{_num(y0 - y1)}" fill="none" stroke="#000000"/>')
    out.append(f'<text x="{_num(cb_x + 18)}" y="{_num(y0)}">{_tick(lo)}</text>')
    out.append(f'<text x="{_num(cb_x + 18)}" y="{_num(y1 + 8)}">{_tick(hi)}</text>')
    out.append("</g>")
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if destination is not None:
        _emit(text, destination)
    return text
