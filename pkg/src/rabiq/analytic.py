"""Closed-form results: effective potentials, semiclassical energy, boundaries, jumps.

Conventions: g1 is measured in units of g_s = sqrt(omega Omega)/2 (``gbar1``)
and the effective two-photon strength g2_tilde = (1 + chi) g2 in units of
g_t = omega/2 (``gbar2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomain
from .model import ModelParams, derive_scales, validate

__all__ = [
    "EffectivePotential",
    "PolaronQuantities",
    "SemiclassicalResult",
    "BoundaryCurve",
    "effective_potential",
    "potential_functions",
    "semiclassical_energy",
    "semiclassical_boundary",
    "boundary_lowfreq",
    "boundary_I",
    "boundary_II",
    "boundary_II_checked",
    "polaron_quantities",
    "jump_sigma_x",
    "jump_sigma_z",
    "boundary_curve",
    "default_x_extent",
    "GBAR1_II_MAX",
]

DELTA_C = math.exp(-1.0)
GBAR1_II_MAX = 4.0


@dataclass(frozen=True)
class EffectivePotential:
    """Per-spin displaced harmonic potentials plus the two-photon bias (units of omega)."""

    stiffness_plus: float
    stiffness_minus: float
    x0_plus: float
    x0_minus: float
    bias_plus: float
    bias_minus: float

    def harmonic(self, x, s: int):
        k = self.stiffness_plus if s > 0 else self.stiffness_minus
        x0 = self.x0_plus if s > 0 else self.x0_minus
        x = np.asarray(x, dtype=float)
        return k * (x - x0) ** 2 / 2.0

    def v_plus(self, x):
        return self.harmonic(x, 1) + self.bias_plus

    def v_minus(self, x):
        return self.harmonic(x, -1) + self.bias_minus


def potential_functions(p: ModelParams) -> EffectivePotential:
    validate(p)
    sc = derive_scales(p)
    return EffectivePotential(
        stiffness_plus=sc.mass_plus * sc.varpi_plus**2,
        stiffness_minus=sc.mass_minus * sc.varpi_minus**2,
        x0_plus=sc.x0_plus,
        x0_minus=sc.x0_minus,
        bias_plus=sc.bias_plus,
        bias_minus=sc.bias_minus,
    )


def effective_potential(p: ModelParams, x):
    """Return ``(v_plus(x), v_minus(x))``; works elementwise on arrays."""
    pot = potential_functions(p)
    return pot.v_plus(x), pot.v_minus(x)


def default_x_extent(p: ModelParams) -> float:
    sc = derive_scales(p)
    return max(8.0, 1.3 * sc.x0_max + 8.0)


# ---------------------------------------------------------------------------
# semiclassical (p^2 -> 0) ground energy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SemiclassicalResult:
    energy: float
    x_star: float
    double_well: bool
    wells: tuple = ()  # (x, energy) of every local minimum, the global one included

    @property
    def displaced(self) -> bool:
        return self.x_star != 0.0


def _lower_surface_excess(p: ModelParams, x):
    """Lower adiabatic energy minus its value at the origin, -(omega + Omega)/2.

    Uses v_s(x) = (1 + s g2t') x^2 / 2 + s g1' x + K, which follows from the
    potential balance v_+(0) = v_-(0) = K, and the cancellation-free form
    sqrt(1 + q^2) - 1 = q^2 / (sqrt(1 + q^2) + 1).
    """
    sc = derive_scales(p)
    x = np.asarray(x, dtype=float)
    q = (p.omega / p.Omega) * (sc.g2_tilde_prime * x * x + 2.0 * sc.g1_prime * x)
    root = np.sqrt(1.0 + q * q)
    return p.omega * x * x / 2.0 - (p.Omega / 2.0) * (q * q / (root + 1.0))


def _golden_min(f, a, b, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def semiclassical_energy(p: ModelParams, n_scan: int = 2001, xtol: float = 1e-12) -> SemiclassicalResult:
    """Minimize the lower eigenvalue of the 2x2 spin matrix over the displacement.

    The scan covers the default wave-function grid; every interior local
    minimum is refined by golden section. ``x_star`` is the global minimizer
    (the ``x >= 0`` one when the surface is mirror symmetric) and is exactly
    0.0 when the origin wins.
    """
    validate(p)
    e_origin = -(p.omega + p.Omega) / 2.0
    L = default_x_extent(p)
    xs = np.linspace(-L, L, n_scan)
    f_arr = _lower_surface_excess(p, xs)

    def f(x):
        return float(_lower_surface_excess(p, x))

    h = xs[1] - xs[0]
    # interior local minima of the scan, refined; the cells touching the origin are
    # always refined because a barely displaced minimum hides inside them
    brackets = [(-h, 0.0), (0.0, h)]
    for i in range(1, n_scan - 1):
        if f_arr[i] <= f_arr[i - 1] and f_arr[i] < f_arr[i + 1] and abs(xs[i]) > 1.5 * h:
            brackets.append((xs[i - 1], xs[i + 1]))
    threshold = 8.0 * np.finfo(float).eps * (p.Omega + p.omega)
    minima = []
    for a, b in brackets:
        xm = _golden_min(f, a, b, xtol)
        fm = f(xm)
        if fm < -threshold and abs(xm) > xtol:
            minima.append((xm, fm))

    best_x, best_f = 0.0, 0.0
    for xm, fm in minima:
        if fm < best_f - threshold:
            best_x, best_f = xm, fm
        elif abs(fm - best_f) <= threshold and best_x != 0.0 and xm > best_x:
            best_x, best_f = xm, fm
    if best_x < 0.0 and abs(f(-best_x) - best_f) <= threshold:
        best_x = -best_x
    # count distinct wells of the surface, the origin included when it is a local minimum
    wells = {round(xm / h) for xm, _ in minima}
    origin_is_min = f_arr[n_scan // 2] <= min(f_arr[n_scan // 2 - 1], f_arr[n_scan // 2 + 1]) and not any(
        abs(xm) < 1.5 * h for xm, _ in minima
    )
    double_well = len(wells) + int(origin_is_min) >= 2
    local = [(float(xm), e_origin + fm) for xm, fm in minima]
    if origin_is_min or best_x == 0.0:
        local.append((0.0, e_origin))
    local.sort()
    return SemiclassicalResult(
        energy=e_origin + best_f,
        x_star=float(best_x),
        double_well=bool(double_well),
        wells=tuple(local),
    )


def semiclassical_boundary(omega, Omega, chi, g2_tilde, tol=1e-9, max_iter=200) -> float:
    """Bisect on g1 for the point where the semiclassical minimizer leaves the origin.

    Independent numerical route to :func:`boundary_lowfreq`. Returns g1 in
    energy units, accurate to ``tol * g_s``.
    """
    g_s = math.sqrt(omega * Omega) / 2.0
    g2 = g2_tilde / (1.0 + chi)

    def displaced(g1):
        p = ModelParams(omega=omega, Omega=Omega, g1=g1, g2=g2, chi=chi)
        return semiclassical_energy(p).displaced

    lo, hi = 0.0, 2.0 * g_s
    if displaced(lo) or not displaced(hi):
        raise OutOfDomain("semiclassical boundary not bracketed by [0, 2 g_s]")
    for _ in range(max_iter):
        if hi - lo <= tol * g_s:
            break
        mid = 0.5 * (lo + hi)
        if displaced(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# transition boundaries
# ---------------------------------------------------------------------------


def boundary_lowfreq(omega, Omega, chi, g2_tilde) -> float:
    """Low-frequency border g1c = g_s sqrt(1 - g2_tilde^2 / g_t^2).

    ``chi`` does not enter: the border depends on g2 only through g2_tilde.
    """
    g_s = math.sqrt(omega * Omega) / 2.0
    g_t = omega / 2.0
    r = g2_tilde / g_t
    if not abs(r) < 1.0:
        raise OutOfDomain(f"|g2_tilde| must be below g_t, got g2_tilde/g_t={r!r}")
    return g_s * math.sqrt(1.0 - r * r)


def boundary_I(omega, Omega) -> float:
    """Single- to double-branch border, sqrt(omega^2 + sqrt(omega^4 + g_s^4))."""
    if omega <= 0 or Omega <= 0:
        raise OutOfDomain("frequencies must be positive")
    g_s = math.sqrt(omega * Omega) / 2.0
    return math.sqrt(omega**2 + math.sqrt(omega**4 + g_s**4))


@dataclass(frozen=True)
class PolaronQuantities:
    zeta: float
    t: float
    delta_c: float = DELTA_C


def polaron_quantities(omega, Omega, gbar1) -> PolaronQuantities:
    if not gbar1 > 1.0:
        raise OutOfDomain(f"gbar1 must exceed 1, got {gbar1!r}")
    zeta = math.sqrt(1.0 - gbar1**-4)
    t = (1.0 - zeta) ** 2 / 2.0 + omega / (gbar1**2 * Omega)
    return PolaronQuantities(zeta=zeta, t=t)


def boundary_II_checked(omega, Omega, gbar1) -> tuple[float, bool]:
    """Return ``(gbar2c_II, underflow)``; see :func:`boundary_II`."""
    pq = polaron_quantities(omega, Omega, gbar1)
    if gbar1 > GBAR1_II_MAX:
        return 0.0, True
    exponent = pq.zeta**2 * gbar1**2 * Omega / (2.0 * omega)
    weight = math.exp(-exponent)
    value = (1.0 - pq.t) * weight / (pq.delta_c * pq.zeta**3 * gbar1**2)
    return value, bool(weight < np.finfo(float).tiny)


def boundary_II(omega, Omega, gbar1) -> float:
    """Double- to broken-branch border in reduced units, g2_tilde/g_t as a function of g1/g_s.

        gbar2c = (1 - t) exp(-zeta^2 gbar1^2 Omega / (2 omega)) / (delta_c zeta^3 gbar1^2)

    with zeta = sqrt(1 - gbar1^-4), t = (1 - zeta)^2/2 + omega/(gbar1^2 Omega)
    and delta_c = 1/e. Defined for gbar1 > 1; above gbar1 = 4 returns 0.
    """
    return boundary_II_checked(omega, Omega, gbar1)[0]


# ---------------------------------------------------------------------------
# jumps at the low-frequency transition
# ---------------------------------------------------------------------------


def jump_sigma_x(g2_tilde, g_t) -> float:
    return 2.0 * g2_tilde**2 / (g2_tilde**2 + g_t**2)


def jump_sigma_z(g2_tilde, g_t) -> float:
    return -2.0 * g2_tilde * g_t / (g2_tilde**2 + g_t**2)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryCurve:
    """Boundary points as (g1, g2_tilde) pairs in energy units."""

    kind: str  # LowFreq | I | II | NumericalI | NumericalII
    points: tuple
    metadata: dict = field(default_factory=dict)

    def reduced(self):
        """Points as (g1/g_s, g2_tilde/g_t)."""
        om, Om = self.metadata["omega"], self.metadata["Omega"]
        g_s = math.sqrt(om * Om) / 2.0
        g_t = om / 2.0
        return [(g1 / g_s, g2 / g_t) for g1, g2 in self.points]


def boundary_curve(kind, omega, Omega=1.0, chi=0.0, values=None, n=101) -> BoundaryCurve:
    """Sample an analytic boundary.

    ``values`` are g2_tilde/g_t for ``LowFreq``, g1/g_s for ``II``; ``I`` is a
    vertical line sampled over g2_tilde/g_t in ``values`` (default [0, 1)).
    Points are sorted by the swept coordinate.
    """
    g_s = math.sqrt(omega * Omega) / 2.0
    g_t = omega / 2.0
    meta = {"omega": omega, "Omega": Omega, "chi": chi}
    if kind == "LowFreq":
        vals = np.linspace(-0.995, 0.995, n) if values is None else np.asarray(values, float)
        pts = [(boundary_lowfreq(omega, Omega, chi, r * g_t), r * g_t) for r in sorted(vals)]
        meta["swept"] = "g2_tilde"
    elif kind == "I":
        vals = np.linspace(0.0, 0.995, n) if values is None else np.asarray(values, float)
        g1c = boundary_I(omega, Omega)
        pts = [(g1c, r * g_t) for r in sorted(vals)]
        meta["swept"] = "g2_tilde"
    elif kind == "II":
        vals = np.linspace(1.05, 2.5, n) if values is None else np.asarray(values, float)
        pts = []
        underflow = False
        for gb in sorted(vals):
            v, flag = boundary_II_checked(omega, Omega, gb)
            underflow |= flag
            pts.append((gb * g_s, v * g_t))
        meta["swept"] = "g1"
        meta["underflow"] = underflow
    else:
        raise ValueError(f"unknown analytic boundary kind {kind!r}")
    return BoundaryCurve(kind=kind, points=tuple(pts), metadata=meta)
