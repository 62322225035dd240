"""Command-line interface: ``rabiq <command> [flags]``.

Exit codes: 0 success, 2 invalid input (flags, config, domain, spectral
collapse), 3 solver failure (no convergence, truncation cap), 4 sweep with
fewer than 99% of grid points solved.

Coupling flags (--g1, --g2 and axis end points) accept ``<float>``,
``<float>gs`` or ``<float>gt``; the suffix is resolved with the given
--omega/--Omega and binds tighter than the sign.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from importlib import resources

import numpy as np

from . import analytic
from .eigensolve import TruncationPolicy, ground_state
from .errors import (
    FactorizationSingular,
    InvalidParams,
    NoConvergence,
    OutOfDomain,
    RabiqError,
    TruncationCapExceeded,
)
from .model import ModelParams, derive_scales, parse_coupling
from .observables import compute_observables
from .report import default_style, render_heatmap_svg, write_boundary_csv, write_csv, write_solution_json
from .sweep import (
    Axis,
    SweepSpec,
    classify_solution,
    estimate_triple_point,
    load_sweep_config,
    run_sweep,
)
from .wavefunction import classify_branch, evaluate_wavefunction, wavefunction_csv

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_PARTIAL = 0, 2, 3, 4
SUCCESS_FRACTION = 0.99
FIGURES = ("1a", "1f", "2c", "2d", "3cd", "3e")


class UsageError(Exception):
    """Bad flag values detected after argparse."""


# ---------------------------------------------------------------------------
# flag helpers
# ---------------------------------------------------------------------------


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("range must look like a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    if n < 2 or not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise argparse.ArgumentTypeError("range needs a < b and n >= 2")
    return a, b, n


def _params(args) -> ModelParams:
    try:
        return ModelParams(
            omega=args.omega,
            Omega=args.Omega,
            g1=parse_coupling(args.g1, args.omega, args.Omega),
            g2=parse_coupling(args.g2, args.omega, args.Omega),
            chi=args.chi,
        )
    except InvalidParams as exc:
        raise UsageError(str(exc)) from exc


def _policy(args) -> TruncationPolicy:
    n_fixed = getattr(args, "n_max", None)
    if n_fixed is not None and n_fixed < 2:
        raise UsageError("--n-max must be at least 2")
    return TruncationPolicy(n_fixed=n_fixed)


def _jobs(args) -> int | None:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("RABIQ_JOBS")
    if env is None:
        return None
    try:
        jobs = int(env)
    except ValueError:
        raise UsageError(f"RABIQ_JOBS must be an integer, got {env!r}")
    if jobs < 1:
        raise UsageError("RABIQ_JOBS must be >= 1")
    return jobs


def _model_flags(p: argparse.ArgumentParser, couplings: bool = True) -> None:
    p.add_argument("--omega", type=_positive, required=True, help="boson frequency")
    p.add_argument("--Omega", type=_positive, default=1.0, help="qubit splitting (default 1)")
    if couplings:
        p.add_argument("--g1", default="0", help="single-photon coupling, e.g. 1.5gs")
        p.add_argument("--g2", default="0", help="two-photon coupling, e.g. 1e-10gt")
    p.add_argument("--chi", type=float, default=0.0, help="Stark-term weight (default 0)")


def _write_text(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    p = _params(args)
    sol = ground_state(p, _policy(args))
    obs = compute_observables(sol, p)
    write_solution_json(sol, obs, sys.stdout, include_coeffs=args.dump_coeffs)
    if args.json_out:
        write_solution_json(sol, obs, args.json_out, include_coeffs=args.dump_coeffs)
    return EXIT_OK


def _axis_flag(text: str, omega: float, Omega: float) -> Axis:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise UsageError(f"axis must look like name:min:max:n[:log], got {text!r}")
    try:
        return Axis(
            name=parts[0],
            min=parse_coupling(parts[1], omega, Omega) if parts[0] != "omega" else float(parts[1]),
            max=parse_coupling(parts[2], omega, Omega) if parts[0] != "omega" else float(parts[2]),
            n_points=int(parts[3]),
            scale=parts[4] if len(parts) == 5 else "linear",
        )
    except (InvalidParams, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def overlay_curves(d, kinds) -> list:
    """Analytic boundary curves sized to a g1 x g2 diagram."""
    p = d.spec.fixed
    axes = {a.name: a for a in d.spec.axes}
    g2_axis = axes.get("g2")
    g1_axis = axes.get("g1")
    curves = []
    for kind in kinds:
        if kind == "lowfreq":
            vals = np.concatenate([np.linspace(-0.995, 0.995, 399), np.geomspace(1e-12, 0.995, 200)])
            curves.append(analytic.boundary_curve("LowFreq", p.omega, p.Omega, p.chi, np.unique(vals)))
        elif kind == "I":
            if g2_axis is None:
                continue
            lo = g2_axis.min * (1 + p.chi) / p.g_t
            hi = g2_axis.max * (1 + p.chi) / p.g_t
            vals = np.geomspace(lo, hi, 50) if g2_axis.scale == "log" else np.linspace(lo, hi, 50)
            curves.append(analytic.boundary_curve("I", p.omega, p.Omega, p.chi, vals))
        elif kind == "II":
            lo, hi = 1.01, analytic.GBAR1_II_MAX
            if g1_axis is not None:
                lo = max(lo, g1_axis.min / p.g_s)
                hi = min(hi, g1_axis.max / p.g_s)
            if lo < hi:
                curves.append(analytic.boundary_curve("II", p.omega, p.Omega, p.chi, np.linspace(lo, hi, 120)))
        else:
            raise UsageError(f"unknown overlay {kind!r}; use lowfreq, I or II")
    return curves


def _run_sweep_outputs(spec, csv_out, svgs: dict, overlays, jobs) -> int:
    d = run_sweep(spec, jobs=jobs)
    if csv_out:
        write_csv(d, csv_out)
    if svgs:
        if len(d.shape) != 2:
            raise UsageError("SVG output needs a two-axis sweep")
        curves = overlay_curves(d, overlays) if overlays else []
        for field_name, path in svgs.items():
            render_heatmap_svg(d, field_name, default_style(field_name, overlay=tuple(curves)), path)
    failed = sum(not r.ok for r in d.rows)
    if failed:
        print(f"rabiq: {failed} of {len(d.rows)} grid points failed; see the error column", file=sys.stderr)
    return EXIT_OK if d.success_fraction >= SUCCESS_FRACTION else EXIT_PARTIAL


def cmd_sweep(args) -> int:
    jobs = _jobs(args)
    if args.config:
        try:
            spec, outputs = load_sweep_config(args.config)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot load config {args.config}: {exc}") from exc
    else:
        if args.omega is None or args.axis1 is None:
            raise UsageError("give --config or at least --omega and --axis1")
        p = _params(args)
        spec = SweepSpec(
            axis1=_axis_flag(args.axis1, p.omega, p.Omega),
            axis2=_axis_flag(args.axis2, p.omega, p.Omega) if args.axis2 else None,
            fixed=p,
            observables=tuple(args.observables.split(",")) if args.observables else None,
            policy=_policy(args),
        )
        outputs = {}
    csv_out = args.out or outputs.get("csv")
    if not csv_out:
        raise UsageError("no CSV destination: pass --out or set output.csv in the config")
    svgs = dict(outputs.get("svg", {}))
    for item in args.svg or []:
        if "=" not in item:
            raise UsageError(f"--svg expects FIELD=FILE, got {item!r}")
        k, v = item.split("=", 1)
        svgs[k] = v
    overlays = args.overlay or outputs.get("overlay", [])
    return _run_sweep_outputs(spec, csv_out, svgs, overlays, jobs)


def cmd_boundary(args) -> int:
    a, b, n = args.range
    values = np.linspace(a, b, n)
    kind = {"lowfreq": "LowFreq", "I": "I", "II": "II"}[args.kind]
    if kind == "II" and a <= 1.0:
        raise OutOfDomain("boundary II needs gbar1 > 1 over the whole range")
    if kind == "LowFreq" and max(abs(a), abs(b)) >= 1.0:
        raise OutOfDomain("the low-frequency boundary needs |g2_tilde/g_t| < 1")
    curve = analytic.boundary_curve(kind, args.omega, args.Omega, args.chi, values)
    if args.out in (None, "-"):
        write_boundary_csv([curve], sys.stdout)
    else:
        write_boundary_csv([curve], args.out)
    return EXIT_OK


def _solve_for_wave(args):
    p = _params(args)
    return ground_state(p, _policy(args))


def cmd_wavefunction(args) -> int:
    sol = _solve_for_wave(args)
    if args.grid:
        grid = evaluate_wavefunction(sol, *args.grid)
    else:
        grid = evaluate_wavefunction(sol)
    _write_text(wavefunction_csv(grid), args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    sol = _solve_for_wave(args)
    if args.grid:
        grid = evaluate_wavefunction(sol, *args.grid)
        cls = classify_branch(grid, derive_scales(sol.params_echo))
    else:
        cls = classify_solution(sol)
    doc = {
        "label": cls.label,
        "peak_count": cls.peak_count,
        "asymmetry": cls.asymmetry,
        "peak_positions": list(cls.peak_positions),
    }
    _write_text(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure reproduction
# ---------------------------------------------------------------------------


def load_figure_fixture(figure: str) -> dict:
    if figure not in FIGURES:
        raise UsageError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    text = resources.files("rabiq").joinpath("fixtures", f"fig{figure}.json").read_text(encoding="utf-8")
    return json.loads(text)


def _reproduce_sweep(fx, out_dir, jobs) -> int:
    spec, outputs = load_sweep_config(fx["sweep"])
    csv_out = os.path.join(out_dir, outputs["csv"])
    svgs = {k: os.path.join(out_dir, v) for k, v in outputs.get("svg", {}).items()}
    code = _run_sweep_outputs(spec, csv_out, svgs, outputs.get("overlay", []), jobs)
    tp = fx.get("triple_point")
    if tp:
        p = spec.fixed
        g1r = [parse_coupling(v, p.omega, p.Omega) for v in tp["g1_range"]]
        g2r = [parse_coupling(v, p.omega, p.Omega) for v in tp["g2_range"]]
        tol = parse_coupling(tp["tol"], p.omega, p.Omega)
        g1s, g2s, unc = estimate_triple_point(p, g1r, g2r, tol, n_g1=tp.get("n_g1", 41), n_g2=tp.get("n_g2", 12))
        doc = {"g1_star": g1s, "g2_star": g2s, "uncertainty": unc,
               "gbar1_star": g1s / p.g_s, "gbar2_star": g2s * (1 + p.chi) / p.g_t}
        with open(os.path.join(out_dir, tp["output"]), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, indent=2) + "\n")
    return code


def _reproduce_wavefunctions(fx, out_dir) -> int:
    omega, Omega = fx["omega"], fx.get("Omega", 1.0)
    summary = []
    for run in fx["runs"]:
        p = ModelParams(
            omega=omega,
            Omega=Omega,
            g1=parse_coupling(run["g1"], omega, Omega),
            g2=parse_coupling(run["g2"], omega, Omega),
            chi=fx.get("chi", 0.0),
        )
        sol = ground_state(p)
        grid = evaluate_wavefunction(sol)
        wavefunction_csv(grid, os.path.join(out_dir, run["output"]))
        cls = classify_solution(sol)
        summary.append({"g1": run["g1"], "g2": run["g2"], "label": cls.label,
                        "asymmetry": cls.asymmetry, "sigma_z": compute_observables(sol, p).sigma_z})
    with open(os.path.join(out_dir, fx["summary"]), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def _reproduce_lines(fx, out_dir, jobs) -> int:
    worst = EXIT_OK
    for line in fx["lines"]:
        omega, Omega = line["omega"], line.get("Omega", 1.0)
        cfg = {
            "fixed": {"omega": omega, "Omega": Omega, "chi": line.get("chi", 0.0),
                      "g1": line.get("g1", 0.0), "g2": line.get("g2", 0.0)},
            "axis1": line["axis"],
            "observables": line.get("observables"),
        }
        spec, _ = load_sweep_config(cfg)
        worst = max(worst, _run_sweep_outputs(spec, os.path.join(out_dir, line["output"]), {}, [], jobs))
    return worst


def cmd_reproduce(args) -> int:
    fx = load_figure_fixture(args.figure)
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    jobs = _jobs(args)
    kind = fx["kind"]
    if kind == "sweep":
        return _reproduce_sweep(fx, out_dir, jobs)
    if kind == "wavefunctions":
        return _reproduce_wavefunctions(fx, out_dir)
    if kind == "lines":
        return _reproduce_lines(fx, out_dir, jobs)
    raise UsageError(f"fixture for {args.figure} has unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rabiq", description="Ground states of the Rabi model with one- and two-photon coupling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="ground state and observables as JSON")
    _model_flags(p)
    p.add_argument("--n-max", type=int, default=None, help="fixed truncation (skips the adaptive ladder)")
    p.add_argument("--json-out", default=None, help="also write the JSON document here")
    p.add_argument("--dump-coeffs", action="store_true", help="include the coefficient vector")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="parameter-grid sweep to CSV (and SVG)")
    p.add_argument("--config", default=None, help="JSON sweep configuration")
    p.add_argument("--omega", type=_positive, default=None)
    p.add_argument("--Omega", type=_positive, default=1.0)
    p.add_argument("--g1", default="0")
    p.add_argument("--g2", default="0")
    p.add_argument("--chi", type=float, default=0.0)
    p.add_argument("--axis1", default=None, help="name:min:max:n[:log], e.g. g1:0gs:2gs:81")
    p.add_argument("--axis2", default=None)
    p.add_argument("--observables", default=None, help="comma-separated subset to keep")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default $RABIQ_JOBS or 1)")
    p.add_argument("--out", default=None, help="CSV destination")
    p.add_argument("--svg", action="append", help="FIELD=FILE heatmap, repeatable")
    p.add_argument("--overlay", action="append", choices=("lowfreq", "I", "II"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="analytic boundary curve to CSV")
    p.add_argument("--kind", required=True, choices=("lowfreq", "I", "II"))
    _model_flags(p, couplings=False)
    p.add_argument("--range", type=_range, required=True,
                   help="a:b:n over g2_tilde/g_t (lowfreq, I) or g1/g_s (II)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_boundary)

    for name, func, helptext in (
        ("wavefunction", cmd_wavefunction, "real-space spin components to CSV"),
        ("classify", cmd_classify, "branch classification as JSON"),
    ):
        p = sub.add_parser(name, help=helptext)
        _model_flags(p)
        p.add_argument("--grid", type=_range, default=None, help="x_min:x_max:n_points")
        p.add_argument("--n-max", type=int, default=None)
        p.add_argument("--out", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("reproduce", help="pinned desk-scale figure replicas")
    p.add_argument("--figure", required=True, choices=FIGURES)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_reproduce)
    return parser


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv: list) -> list:
    """Turn ``--g2 -1e-10gt`` into ``--g2=-1e-10gt`` so argparse keeps it as a value."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (UsageError, InvalidParams, OutOfDomain) as exc:
        print(f"rabiq: error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_INPUT
    except (NoConvergence, TruncationCapExceeded, FactorizationSingular) as exc:
        print(f"rabiq: solver failure: {_one_line(exc)}", file=sys.stderr)
        return EXIT_SOLVER
    except RabiqError as exc:
        print(f"rabiq: error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_INPUT


def _one_line(exc) -> str:
    return " ".join(str(exc).split())


if __name__ == "__main__":
    sys.exit(main())
