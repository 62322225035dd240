"""Parameter-grid sweeps, transition detection and boundary refinement.

A sweep solves every grid point independently (no warm starts), so the rows
of a :class:`PhaseDiagram` depend only on the grid, never on how many worker
processes ran it. Rows are stored in row-major order: axis1 is the slow
index, axis2 the fast one.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from multiprocessing import get_context

import numpy as np
from scipy.signal import find_peaks

from .analytic import default_x_extent, jump_sigma_z
from .eigensolve import GroundSolution, TruncationPolicy, ground_state
from .errors import InvalidParams, NoSignChange, NotFound, RabiqError
from .model import ModelParams, derive_scales, parse_coupling
from .observables import ObservableSet, compute_observables
from .wavefunction import BranchClass, ClassifierConfig, classify_branch, evaluate_wavefunction

__all__ = [
    "Axis",
    "SweepSpec",
    "SweepPoint",
    "PhaseDiagram",
    "TransitionPoint",
    "run_sweep",
    "solve_point",
    "classify_solution",
    "detect_transitions",
    "locate_boundary",
    "estimate_triple_point",
    "group_response",
    "Response",
    "load_sweep_config",
    "OBSERVABLE_NAMES",
    "SIGMA_Z_JUMP",
]

SWEEPABLE = ("g1", "g2", "omega")
OBSERVABLE_NAMES = tuple(f.name for f in fields(ObservableSet) if f.name != "reliable")
SIGMA_Z_JUMP = 0.1
SLOPE_PROMINENCE = 3.0
MAX_BISECTIONS = 60
KINDS = ("I", "II", "LowFreqMerged")
DETECTORS = ("SigmaXSlope", "BranchChange", "SigmaZJump")


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    n_points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise InvalidParams(f"axis must be one of {SWEEPABLE}, got {self.name!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidParams("an axis needs n_points >= 2")
        if self.scale not in ("linear", "log"):
            raise InvalidParams(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and not (self.min > 0 and self.max > 0):
            raise InvalidParams("a log axis needs positive end points")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise InvalidParams("axis end points must be finite")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.n_points)
        return np.linspace(self.min, self.max, self.n_points)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis | None = None
    fixed: ModelParams = field(default_factory=lambda: ModelParams(omega=0.001))
    observables: tuple | None = None  # None keeps everything; names from OBSERVABLE_NAMES plus "branch"
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)
    jobs: int = 1
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise InvalidParams("the two axes must sweep different parameters")
        if int(self.jobs) != self.jobs or self.jobs < 1:
            raise InvalidParams("jobs must be an integer >= 1")
        if self.observables is not None:
            unknown = set(self.observables) - set(OBSERVABLE_NAMES) - {"branch"}
            if unknown:
                raise InvalidParams(f"unknown observables: {sorted(unknown)}")
            object.__setattr__(self, "observables", tuple(self.observables))

    @property
    def shape(self) -> tuple:
        if self.axis2 is None:
            return (self.axis1.n_points,)
        return (self.axis1.n_points, self.axis2.n_points)

    @property
    def axes(self) -> tuple:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)

    def wants(self, name: str) -> bool:
        return self.observables is None or name in self.observables

    def grid(self):
        """Yield (index, ModelParams) in row-major order."""
        vals = [a.values() for a in self.axes]
        for index in np.ndindex(*self.shape):
            changes = {a.name: float(v[i]) for a, v, i in zip(self.axes, vals, index)}
            yield index, self.fixed.replace(**changes)


@dataclass(frozen=True)
class SweepPoint:
    index: tuple
    params: ModelParams
    energy: float | None = None
    gap: float | None = None
    observables: ObservableSet | None = None
    branch: BranchClass | None = None
    n_max_used: int | None = None
    degenerate: bool | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def value(self, name: str):
        """Scalar column lookup used by detectors and renderers."""
        if name in ("energy", "gap", "n_max_used", "degenerate"):
            return getattr(self, name)
        if name == "branch":
            return None if self.branch is None else self.branch.label
        if name in ("g1", "g2", "omega", "Omega", "chi"):
            return getattr(self.params, name)
        if name == "g2_tilde":
            return self.params.g2_tilde
        if self.observables is None:
            return None
        return getattr(self.observables, name)


@dataclass(frozen=True)
class PhaseDiagram:
    spec: SweepSpec
    rows: tuple

    @property
    def shape(self) -> tuple:
        return self.spec.shape

    @property
    def complete(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def success_fraction(self) -> float:
        return sum(r.ok for r in self.rows) / len(self.rows)

    def axis_values(self, k: int = 0) -> np.ndarray:
        return self.spec.axes[k].values()

    def field(self, name: str) -> np.ndarray:
        """Column as an array shaped like the grid; NaN where undefined."""
        out = np.full(len(self.rows), np.nan)
        for i, r in enumerate(self.rows):
            v = r.value(name)
            if v is not None and not isinstance(v, str):
                out[i] = float(v)
        return out.reshape(self.shape)

    def _axis_number(self, along) -> int:
        if along in (0, 1):
            k = along
        elif along in ("axis1", "axis2"):
            k = 0 if along == "axis1" else 1
        else:
            names = [a.name for a in self.spec.axes]
            if along not in names:
                raise InvalidParams(f"no axis {along!r}; axes are {names}")
            k = names.index(along)
        if k >= len(self.shape):
            raise InvalidParams("this diagram has a single axis")
        return k

    def line(self, along=0, line_index: int = 0):
        """Swept values and rows along one axis with the other index held at ``line_index``."""
        k = self._axis_number(along)
        idx = np.arange(len(self.rows)).reshape(self.shape)
        if len(self.shape) == 1:
            sel = idx
        elif k == 0:
            sel = idx[:, line_index]
        else:
            sel = idx[line_index, :]
        return self.axis_values(k), [self.rows[i] for i in sel]


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------


def _branch_window(sol: GroundSolution) -> tuple[float, float]:
    """Grid limits that hold the whole packet but skip empty space.

    Basis functions up to n_max vanish beyond sqrt(2 n_max + 1) + a few
    lengths from the basis centre, so the default (potential-based) grid can
    be cut down to that window.
    """
    centre = math.sqrt(2.0) * sol.basis_shift
    half = math.sqrt(2.0 * sol.n_max_used + 1.0) + 8.0
    ext = default_x_extent(sol.params_echo)
    return max(-ext, centre - half), min(ext, centre + half)


def classify_solution(sol: GroundSolution, config: ClassifierConfig | None = None) -> BranchClass:
    lo, hi = _branch_window(sol)
    grid = evaluate_wavefunction(sol, lo, hi)
    return classify_branch(grid, derive_scales(sol.params_echo), config)


def solve_point(p: ModelParams, policy: TruncationPolicy | None = None, branch: bool = True,
                config: ClassifierConfig | None = None, index: tuple = ()) -> SweepPoint:
    """Solve one grid point; library errors become an error record."""
    try:
        sol = ground_state(p, policy)
        obs = compute_observables(sol, p)
        cls = classify_solution(sol, config) if branch else None
    except RabiqError as exc:
        return SweepPoint(index=index, params=p, error=f"{type(exc).__name__}: {exc}")
    return SweepPoint(
        index=index,
        params=p,
        energy=sol.energy,
        gap=sol.gap,
        observables=obs,
        branch=cls,
        n_max_used=sol.n_max_used,
        degenerate=sol.degenerate,
    )


def _solve_task(task):
    index, p, policy, branch, config = task
    return solve_point(p, policy, branch, config, index)


def run_sweep(spec: SweepSpec, jobs: int | None = None, progress=None) -> PhaseDiagram:
    """Solve every grid point of ``spec`` and assemble rows in grid order.

    ``jobs`` overrides ``spec.jobs``. With more than one job the points are
    farmed out to worker processes; results are reassembled by grid index,
    so the output is identical for any worker count.
    """
    jobs = spec.jobs if jobs is None else int(jobs)
    if jobs < 1:
        raise InvalidParams("jobs must be >= 1")
    want_branch = spec.wants("branch")
    tasks = [(idx, p, spec.policy, want_branch, spec.classifier) for idx, p in spec.grid()]
    results = []
    if jobs == 1 or len(tasks) == 1:
        for t in tasks:
            results.append(_solve_task(t))
            if progress:
                progress(len(results), len(tasks))
    else:
        chunk = max(1, len(tasks) // (8 * jobs))
        with ProcessPoolExecutor(max_workers=jobs, mp_context=get_context("spawn")) as pool:
            for r in pool.map(_solve_task, tasks, chunksize=chunk):
                results.append(r)
                if progress:
                    progress(len(results), len(tasks))
    results.sort(key=lambda r: r.index)
    return PhaseDiagram(spec=spec, rows=tuple(results))


# ---------------------------------------------------------------------------
# transition detection along grid lines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransitionPoint:
    kind: str
    location: float
    bracket: tuple
    detector: str
    detectors: tuple = ()  # every detector that fired within this transition
    swept: str = "g1"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}")
        lo, hi = self.bracket
        if not lo < self.location < hi:
            raise ValueError("location must lie strictly inside its bracket")
        if not self.detectors:
            object.__setattr__(self, "detectors", (self.detector,))


def _branch_kind(a: str, b: str) -> str | None:
    pair = {a, b}
    if pair == {"single", "double"}:
        return "I"
    if pair == {"double", "broken"}:
        return "II"
    if pair == {"single", "broken"}:
        return "LowFreqMerged"
    return None


def _raw_detections(x: np.ndarray, rows: list) -> list:
    """(kind, location, lo, hi, detector, cell) for every individual detector hit.

    ``cell`` is the grid interval the hit is attached to; slope peaks at grid
    point i use the interval (i-1, i+1).
    """
    hits = []
    sx = np.array([r.value("sigma_x") if r.ok else np.nan for r in rows], dtype=float)
    sz = np.array([r.value("sigma_z") if r.ok else np.nan for r in rows], dtype=float)
    labels = [r.value("branch") if r.ok else None for r in rows]

    if np.all(np.isfinite(sx)) and len(x) >= 3:
        slope = np.abs(np.gradient(sx, x))
        floor = SLOPE_PROMINENCE * float(np.median(slope))
        peaks, _ = find_peaks(slope, prominence=floor if floor > 0 else None)
        for i in peaks:
            if slope[i] > 0:
                hits.append(("I", float(x[i]), float(x[i - 1]), float(x[i + 1]), "SigmaXSlope", (i - 1, i + 1)))

    for i in range(len(x) - 1):
        a, b = labels[i], labels[i + 1]
        if a is not None and b is not None and a != b:
            kind = _branch_kind(a, b)
            if kind is not None:
                mid = 0.5 * (x[i] + x[i + 1])
                hits.append((kind, float(mid), float(x[i]), float(x[i + 1]), "BranchChange", (i, i + 1)))
        if np.isfinite(sz[i]) and np.isfinite(sz[i + 1]) and abs(sz[i + 1] - sz[i]) > SIGMA_Z_JUMP:
            mid = 0.5 * (x[i] + x[i + 1])
            hits.append(("II", float(mid), float(x[i]), float(x[i + 1]), "SigmaZJump", (i, i + 1)))
    return hits


def _cluster(hits: list) -> list:
    """Single-linkage grouping of hits whose grid cells touch or lie one cell apart."""
    hits = sorted(hits, key=lambda h: (h[5][0], h[5][1], DETECTORS.index(h[4])))
    groups = []
    for h in hits:
        if groups and h[5][0] <= max(g[5][1] for g in groups[-1]) + 1:
            groups[-1].append(h)
        else:
            groups.append([h])
    return groups


def _resolve(group: list, swept: str) -> TransitionPoint:
    dets = {h[4] for h in group}
    branch_hits = [h for h in group if h[4] == "BranchChange"]
    if branch_hits:
        # the branch label is authoritative for both kind and position
        auth = branch_hits[0]
        kinds = {h[0] for h in branch_hits}
        kind = auth[0] if len(kinds) == 1 else "LowFreqMerged"
    elif "SigmaZJump" in dets:
        auth = [h for h in group if h[4] == "SigmaZJump"][0]
        kind = "LowFreqMerged" if "SigmaXSlope" in dets else "II"
    else:
        auth = group[0]
        kind = "I"
    order = tuple(d for d in DETECTORS if d in dets)
    return TransitionPoint(kind=kind, location=auth[1], bracket=(auth[2], auth[3]),
                           detector=auth[4], detectors=order, swept=swept)


def _consolidate(points: list) -> list:
    hosts = [p for p in points if p.detector == "BranchChange"]
    extra = {id(h): set(h.detectors) for h in hosts}
    out = []
    for p in points:
        if p.detector == "BranchChange":
            continue
        same = [h for h in hosts if h.kind == p.kind]
        if not same:
            out.append(p)
            continue
        nearest = min(same, key=lambda h: abs(h.location - p.location))
        extra[id(nearest)].update(p.detectors)
    for h in hosts:
        dets = tuple(d for d in DETECTORS if d in extra[id(h)])
        out.append(TransitionPoint(h.kind, h.location, h.bracket, h.detector, dets, h.swept))
    return out


def detect_transitions(d: PhaseDiagram, along=0, line_index: int = 0, consolidate: bool = True) -> list:
    """Transitions along one grid line, ordered by position.

    Detectors:

    * ``SigmaXSlope``: local maxima of |d<sigma_x>/dg| (central differences)
      whose prominence exceeds 3x the median slope on the line -> kind I.
    * ``BranchChange``: label changes single/double (I), double/broken (II),
      single/broken (LowFreqMerged).
    * ``SigmaZJump``: |delta <sigma_z>| > 0.1 between neighbours -> II.

    Hits within one grid cell of each other are merged, with the branch
    label deciding kind and location. With ``consolidate`` (default) a
    slope-only or jump-only transition is further folded into a branch-change
    transition of the same kind elsewhere on the line, so that each physical
    boundary is reported once even when the observable response is broad.
    """
    k = d._axis_number(along)
    x, rows = d.line(k, line_index)
    swept = d.spec.axes[k].name
    if len(x) < 2:
        return []
    groups = _cluster(_raw_detections(np.asarray(x, float), rows))
    points = [_resolve(g, swept) for g in groups]
    if consolidate:
        points = _consolidate(points)
    return sorted(points, key=lambda p: p.location)


@dataclass(frozen=True)
class Response:
    """How one observable responds across a transition.

    ``delta`` is the value change and ``kink`` the change of slope between
    the two sides; the ``baseline_*`` fields are the same measures taken
    over an equally wide stretch at the start of the line.
    """

    delta: float
    kink: float
    baseline_delta: float
    baseline_kink: float


def group_response(d: PhaseDiagram, transition: TransitionPoint, along=0, line_index: int = 0,
                   window: int = 2, names=("sigma_x", "photon_number", "spp_correlation", "p2_ratio",
                                            "sigma_z", "displacement")) -> dict:
    """Per-observable :class:`Response` across ``transition``.

    The sides are the ``window`` cells just outside the transition bracket.
    A continuous transition (kind I) shows up mainly in ``kink``; a jump
    (kind II) in ``delta``.
    """
    k = d._axis_number(along)
    x, rows = d.line(k, line_index)
    x = np.asarray(x, float)
    i_lo = int(np.argmin(np.abs(x - transition.bracket[0])))
    i_hi = int(np.argmin(np.abs(x - transition.bracket[1])))
    a = max(0, i_lo - window)
    b = min(len(x) - 1, i_hi + window)
    if a == i_lo or b == i_hi or 2 * window + (i_hi - i_lo) >= len(x):
        raise InvalidParams("transition too close to the line ends for the requested window")
    span = b - a

    def slope(v, i, j):
        return (v[j] - v[i]) / (x[j] - x[i])

    out = {}
    for name in names:
        v = np.array([r.value(name) for r in rows], dtype=float)
        out[name] = Response(
            delta=float(abs(v[b] - v[a])),
            kink=float(abs(slope(v, i_hi, b) - slope(v, a, i_lo))),
            baseline_delta=float(abs(v[span] - v[0])),
            baseline_kink=float(abs(slope(v, span - window, span) - slope(v, 0, window))),
        )
    return out


# ---------------------------------------------------------------------------
# 1-d refinement
# ---------------------------------------------------------------------------


def _with(p: ModelParams, swept: str, value: float) -> ModelParams:
    if swept not in SWEEPABLE:
        raise InvalidParams(f"cannot sweep {swept!r}; choose from {SWEEPABLE}")
    return p.replace(**{swept: float(value)})


def _branch_label(p, policy, config):
    pt = solve_point(p, policy, True, config)
    if not pt.ok:
        raise InvalidParams(f"solve failed at {p}: {pt.error}")
    return pt.branch.label


def _sigma_z(p, policy):
    sol = ground_state(p, policy)
    return compute_observables(sol, p).sigma_z


def locate_boundary(p_base: ModelParams, swept: str, bracket, detector: str = "BranchChange", tol: float = 1e-6,
                    threshold: float | None = None, policy: TruncationPolicy | None = None,
                    config: ClassifierConfig | None = None, kind: str | None = None) -> TransitionPoint:
    """Bisect a detector predicate between ``bracket = (lo, hi)`` down to width ``tol``.

    ``BranchChange`` keeps the sub-interval whose end labels differ.
    ``SigmaZJump`` bisects on |<sigma_z>| > threshold; the default threshold is
    the larger of 0.1 and half the closed-form jump |Delta sigma_z| at the
    base g2_tilde. At most 60 halvings are performed.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise InvalidParams("bracket must satisfy lo < hi")
    if not tol > 0:
        raise InvalidParams("tol must be positive")

    if detector == "BranchChange":
        def state(v):
            return _branch_label(_with(p_base, swept, v), policy, config)
    elif detector == "SigmaZJump":
        if threshold is None:
            threshold = SIGMA_Z_JUMP
            if p_base.g2 != 0.0 and swept != "g2":
                threshold = max(threshold, 0.5 * abs(jump_sigma_z(p_base.g2_tilde, p_base.g_t)))

        def state(v):
            return abs(_sigma_z(_with(p_base, swept, v), policy)) > threshold
    else:
        raise InvalidParams(f"no bisection predicate for detector {detector!r}")

    s_lo, s_hi = state(lo), state(hi)
    if s_lo == s_hi:
        raise NoSignChange(f"{detector} predicate is {s_lo!r} at both ends of [{lo}, {hi}]")
    end_states = (s_lo, s_hi)
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        s_mid = state(mid)
        if s_mid == s_lo:
            lo = mid
        else:
            hi, s_hi = mid, s_mid
    if kind is None:
        if detector == "BranchChange":
            kind = _branch_kind(s_lo, s_hi) or _branch_kind(*end_states) or "I"
        else:
            kind = "II"
    return TransitionPoint(kind=kind, location=0.5 * (lo + hi), bracket=(lo, hi),
                           detector=detector, swept=swept)


def _labels_along_g1(p_base, g1_values, policy, config):
    return [_branch_label(p_base.replace(g1=float(v)), policy, config) for v in g1_values]


def _boundaries_at(p_base, g1_values, tol, policy, config):
    """(g1_I, g1_II, merged) from a label scan along g1, refined by bisection."""
    labels = _labels_along_g1(p_base, g1_values, policy, config)
    found = {}
    for i in range(len(labels) - 1):
        kind = _branch_kind(labels[i], labels[i + 1]) if labels[i] != labels[i + 1] else None
        if kind is not None and kind not in found:
            found[kind] = locate_boundary(p_base, "g1", (g1_values[i], g1_values[i + 1]), "BranchChange",
                                          tol / 4.0, policy=policy, config=config).location
    if "I" in found and "II" in found:
        return found["I"], found["II"], abs(found["II"] - found["I"]) <= tol
    if "LowFreqMerged" in found:
        return found["LowFreqMerged"], found["LowFreqMerged"], True
    return found.get("I"), found.get("II"), False


def estimate_triple_point(p_base: ModelParams, g1_range, g2_range, tol: float, n_g1: int = 41, n_g2: int = 12,
                          refine: int = 6, policy: TruncationPolicy | None = None,
                          config: ClassifierConfig | None = None):
    """Smallest g2 at which boundaries I and II meet along g1.

    Scans g2 downward over ``n_g2`` values (geometric when the range is
    positive), locating both boundaries along a ``n_g1``-point g1 line at
    each step, then bisects ``refine`` times between the last merged and the
    first separated g2. Returns ``(g1_star, g2_star, uncertainty)`` where the
    uncertainty is the half-width of the final g2 bracket.
    """
    g1_lo, g1_hi = map(float, g1_range)
    g2_lo, g2_hi = map(float, g2_range)
    if not (g1_lo < g1_hi and g2_lo < g2_hi):
        raise InvalidParams("ranges must be increasing")
    if tol >= g1_hi - g1_lo:
        raise NotFound("tolerance spans the whole g1 range; boundaries cannot be told apart")
    g1_values = np.linspace(g1_lo, g1_hi, n_g1)
    if g2_lo > 0:
        g2_values = np.geomspace(g2_hi, g2_lo, n_g2)
    else:
        g2_values = np.linspace(g2_hi, g2_lo, n_g2)

    def merged_at(g2):
        b1, b2, merged = _boundaries_at(p_base.replace(g2=float(g2)), g1_values, tol, policy, config)
        return merged, (b1 if b1 is not None else b2)

    last_merged = None
    for g2 in g2_values:
        merged, g1 = merged_at(g2)
        if merged:
            last_merged = (g2, g1)
            continue
        if last_merged is None:
            continue
        # crossed from merged (above) to separated (here)
        hi, g1_star = last_merged
        lo = g2
        for _ in range(refine):
            mid = math.sqrt(lo * hi) if lo > 0 else 0.5 * (lo + hi)
            m, g1_mid = merged_at(mid)
            if m:
                hi, g1_star = mid, g1_mid
            else:
                lo = mid
        return g1_star, hi, 0.5 * (hi - lo)
    if last_merged is None:
        raise NotFound("boundaries I and II never merge in the scanned range")
    raise NotFound("boundaries stay merged down to the bottom of the g2 range")


# ---------------------------------------------------------------------------
# configuration files
# ---------------------------------------------------------------------------


def _axis_from(cfg: dict, omega: float, Omega: float) -> Axis:
    return Axis(
        name=cfg["name"],
        min=parse_coupling(cfg["min"], omega, Omega),
        max=parse_coupling(cfg["max"], omega, Omega),
        n_points=int(cfg["n_points"]),
        scale=cfg.get("scale", "linear"),
    )


def load_sweep_config(source) -> tuple:
    """Read a JSON sweep configuration; returns ``(SweepSpec, outputs)``.

    Schema::

        {
          "fixed":  {"omega": 0.001, "Omega": 1.0, "chi": 0.0, "g1": 0, "g2": 0},
          "axis1":  {"name": "g1", "min": "0gs", "max": "2gs", "n_points": 81, "scale": "linear"},
          "axis2":  {"name": "g2", "min": "-0.995gt", "max": "0.995gt", "n_points": 81},
          "observables": ["sigma_z", "sigma_x", "branch"],
          "policy": {"n_initial": 32, "growth_factor": 1.5, "n_cap": 16384},
          "jobs": 1,
          "output": {"csv": "out.csv", "svg": {"sigma_z": "out.svg"}, "overlay": ["lowfreq"]}
        }

    Couplings accept the ``gs``/``gt`` suffixes. ``axis2``, ``observables``,
    ``policy``, ``jobs`` and ``output`` are optional. ``RABIQ_JOBS`` is
    *not* consulted here; the command line layer handles it.
    """
    if isinstance(source, dict):
        cfg = source
    elif hasattr(source, "read"):
        cfg = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            cfg = json.load(fh)
    if not isinstance(cfg, dict) or "axis1" not in cfg:
        raise InvalidParams("sweep config needs at least an 'axis1' entry")
    fixed = dict(cfg.get("fixed", {}))
    if "omega" not in fixed:
        raise InvalidParams("sweep config needs fixed.omega")
    omega = float(fixed["omega"])
    Omega = float(fixed.get("Omega", 1.0))
    params = ModelParams(
        omega=omega,
        Omega=Omega,
        g1=parse_coupling(fixed.get("g1", 0.0), omega, Omega),
        g2=parse_coupling(fixed.get("g2", 0.0), omega, Omega),
        chi=float(fixed.get("chi", 0.0)),
    )
    unknown = set(fixed) - {"omega", "Omega", "g1", "g2", "chi"}
    if unknown:
        raise InvalidParams(f"unknown fixed parameters: {sorted(unknown)}")
    try:
        policy = TruncationPolicy(**cfg.get("policy", {}))
    except (TypeError, ValueError) as exc:
        raise InvalidParams(f"bad policy: {exc}") from exc
    spec = SweepSpec(
        axis1=_axis_from(cfg["axis1"], omega, Omega),
        axis2=_axis_from(cfg["axis2"], omega, Omega) if cfg.get("axis2") else None,
        fixed=params,
        observables=tuple(cfg["observables"]) if cfg.get("observables") else None,
        policy=policy,
        jobs=int(cfg.get("jobs", 1)),
    )
    return spec, dict(cfg.get("output", {}))
