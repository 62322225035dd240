"""Real-space spin components and wave-packet topology.

The state is written |psi> = psi^+ |up> - psi^- |down>, so ``psi_minus`` is
the *negated* spin-down amplitude. In the decoupled ground state both
components are the same positive Gaussian.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .analytic import default_x_extent
from .errors import GridTooCoarse
from .model import DerivedScales

__all__ = [
    "WaveGrid",
    "BranchClass",
    "ClassifierConfig",
    "hermite_functions",
    "evaluate_wavefunction",
    "classify_branch",
    "wavefunction_csv",
    "packet_extent",
]

_RESCALE_BITS = 400
_BIG = 2.0**_RESCALE_BITS
_LOG2_PI_QUARTER = math.log2(math.pi) / 4.0


def _seed(x: np.ndarray):
    """phi_0 as mantissa * 2**exponent with an integer exponent per point."""
    log2_phi0 = -(x * x) / (2.0 * math.log(2.0)) - _LOG2_PI_QUARTER
    expo = np.floor(log2_phi0)
    return np.exp2(log2_phi0 - expo), expo


def _recurrence(coeff_rows, x):
    """Accumulate sum_n coeff_rows[:, n] * phi_n(x) with per-point exponent scaling.

    phi_n = x sqrt(2/n) phi_{n-1} - sqrt((n-1)/n) phi_{n-2}
    """
    coeff_rows = np.atleast_2d(coeff_rows)
    n_levels = coeff_rows.shape[1]
    prev, expo = _seed(x)
    prev2 = np.zeros_like(prev)
    acc = np.outer(coeff_rows[:, 0], prev)
    for n in range(1, n_levels):
        cur = x * math.sqrt(2.0 / n) * prev - math.sqrt((n - 1) / n) * prev2
        prev2, prev = prev, cur
        acc += np.outer(coeff_rows[:, n], cur)
        big = np.abs(cur) > _BIG
        if big.any():
            prev[big] /= _BIG
            prev2[big] /= _BIG
            acc[:, big] /= _BIG
            expo[big] += _RESCALE_BITS
    return np.ldexp(acc, np.broadcast_to(expo.astype(np.int64), acc.shape))


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalized Hermite functions phi_0..phi_{n_max} on ``x``, shape (n_max + 1, len(x))."""
    x = np.asarray(x, dtype=float)
    return _recurrence(np.eye(n_max + 1), x)


@dataclass(frozen=True, eq=False)
class WaveGrid:
    x: np.ndarray
    psi_plus: np.ndarray
    psi_minus: np.ndarray

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def density(self) -> np.ndarray:
        return self.psi_plus**2 + self.psi_minus**2

    def norm(self) -> float:
        return float(self.density.sum() * self.dx)


def evaluate_wavefunction(sol, x_min=None, x_max=None, n_points=None) -> WaveGrid:
    """Spin components psi^+(x), psi^-(x) of a ground state on a uniform grid.

    The default grid is symmetric, spans both potential minima with margin
    and keeps the spacing at or below 0.05 oscillator lengths.
    For a solution in a displaced basis the default grid is widened to
    include the packet centre.
    """
    if x_max is None:
        x_max = max(default_x_extent(sol.params_echo), packet_extent(sol))
    if x_min is None:
        x_min = -x_max
    if n_points is None:
        n_points = max(2001, int(math.ceil((x_max - x_min) / 0.05)) + 1)
    if n_points < 64:
        raise GridTooCoarse("n_points must be at least 64")
    x = np.linspace(x_min, x_max, n_points)
    rows = np.vstack([sol.up, -sol.down])
    # a displaced basis is centred at x = sqrt(2) alpha
    shift = math.sqrt(2.0) * sol.basis_shift
    vals = _recurrence(rows, x - shift)
    grid = WaveGrid(x=x, psi_plus=vals[0], psi_minus=vals[1])
    err = abs(grid.norm() - 1.0)
    if err > 1e-3:
        raise GridTooCoarse(f"grid normalization off by {err:.3g}; widen or refine the grid")
    return grid


def packet_extent(sol) -> float:
    """|x| beyond which every basis function of ``sol`` has decayed."""
    centre = abs(math.sqrt(2.0) * sol.basis_shift)
    return centre + math.sqrt(2.0 * sol.n_max_used + 1.0) + 8.0


@dataclass(frozen=True)
class ClassifierConfig:
    peak_height: float = 0.05
    peak_separation: float = 2.0
    minority_mass: float = 0.2
    asymmetry: float = 0.6
    displacement: float = 0.3


@dataclass(frozen=True)
class BranchClass:
    label: str  # "single" | "double" | "broken"
    peak_count: int
    asymmetry: float
    peak_positions: tuple


def classify_branch(grid: WaveGrid, scales: DerivedScales | None = None, config: ClassifierConfig | None = None) -> BranchClass:
    """Label the wave packet topology as single, double or broken branch.

    Rules, first match wins: ``double`` if there are at least two density
    peaks and each half line holds at least ``minority_mass`` of the weight;
    ``broken`` if the left/right asymmetry reaches ``asymmetry`` and the
    dominant peak sits at least ``displacement * max(1, min|x0|)`` from the
    origin; ``single`` otherwise.
    """
    cfg = config or ClassifierConfig()
    rho = grid.density
    x = grid.x
    dx = grid.dx
    distance = max(1, int(math.ceil(cfg.peak_separation / dx - 1e-9)))
    idx, _ = find_peaks(rho, height=cfg.peak_height * rho.max(), distance=distance)
    # find_peaks ignores the end points; a plateau-free edge maximum is not a packet anyway
    peaks = x[idx]
    w_left = float(rho[x < 0].sum() + 0.5 * rho[x == 0].sum())
    w_right = float(rho[x > 0].sum() + 0.5 * rho[x == 0].sum())
    total = w_left + w_right
    w_left, w_right = w_left / total, w_right / total
    asym = w_right - w_left

    x0_min = 0.0
    if scales is not None:
        x0_min = min(abs(scales.x0_plus), abs(scales.x0_minus))
    if idx.size:
        dominant = float(x[idx[np.argmax(rho[idx])]])
    else:
        dominant = float(x[np.argmax(rho)])

    if idx.size >= 2 and min(w_left, w_right) >= cfg.minority_mass:
        label = "double"
    elif abs(asym) >= cfg.asymmetry and abs(dominant) >= cfg.displacement * max(1.0, x0_min):
        label = "broken"
    else:
        label = "single"
    return BranchClass(label=label, peak_count=int(idx.size), asymmetry=float(asym), peak_positions=tuple(float(v) for v in peaks))


def wavefunction_csv(grid: WaveGrid, destination=None) -> str:
    """Columns x, psi_plus, psi_minus, density at 6 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["x", "psi_plus", "psi_minus", "density"])
    for row in zip(grid.x, grid.psi_plus, grid.psi_minus, grid.density):
        w.writerow([f"{v:.6g}" for v in row])
    text = buf.getvalue()
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
    return text
