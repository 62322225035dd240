"""Model parameters and the derived scales of the effective-oscillator picture.

The Hamiltonian is

    H = omega a^dag a + (Omega/2) sigma_x + g1 sigma_z (a^dag + a)
        + g2 sigma_z [(a^dag)^2 + a^2 + chi (a^dag a + a a^dag)]

Writing a = (x + i p)/sqrt(2), the spin-diagonal blocks become displaced
oscillators ``omega (p^2 / 2 m_s + v_s(x)) + eps0`` with

    v_s(x) = m_s varpi_s^2 (x - x0_s)^2 / 2 + b_s,     s = +1 (up), -1 (down)

and all the symbols below follow from (omega, Omega, g1, g2, chi).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DegenerateScaleError, InvalidParams, SpectralCollapse

__all__ = ["ModelParams", "DerivedScales", "derive_scales", "validate", "parse_coupling"]


@dataclass(frozen=True)
class ModelParams:
    omega: float
    Omega: float = 1.0
    g1: float = 0.0
    g2: float = 0.0
    chi: float = 0.0

    @property
    def g_s(self) -> float:
        return math.sqrt(self.omega * self.Omega) / 2.0

    @property
    def g_t(self) -> float:
        return self.omega / 2.0

    @property
    def g2_tilde(self) -> float:
        return (1.0 + self.chi) * self.g2

    def replace(self, **changes) -> "ModelParams":
        fields = dict(omega=self.omega, Omega=self.Omega, g1=self.g1, g2=self.g2, chi=self.chi)
        fields.update(changes)
        return ModelParams(**{k: float(v) for k, v in fields.items()})

    @classmethod
    def from_reduced(cls, omega, gbar1, gbar2, Omega=1.0, chi=0.0) -> "ModelParams":
        """Build params from g1 in units of g_s and g2_tilde in units of g_t."""
        g_s = math.sqrt(omega * Omega) / 2.0
        g_t = omega / 2.0
        return cls(omega=omega, Omega=Omega, g1=gbar1 * g_s, g2=gbar2 * g_t / (1.0 + chi), chi=chi)

    def as_dict(self) -> dict:
        return {"omega": self.omega, "Omega": self.Omega, "g1": self.g1, "g2": self.g2, "chi": self.chi}


@dataclass(frozen=True)
class DerivedScales:
    g_s: float
    g_t: float
    g2_tilde: float
    g1_prime: float
    g2_prime: float
    g2_tilde_prime: float
    gbar1: float
    gbar2: float
    mass_plus: float
    mass_minus: float
    varpi_plus: float
    varpi_minus: float
    x0_plus: float
    x0_minus: float
    bias_plus: float
    bias_minus: float
    eps0: float

    def mass(self, s: int) -> float:
        return self.mass_plus if s > 0 else self.mass_minus

    def varpi(self, s: int) -> float:
        return self.varpi_plus if s > 0 else self.varpi_minus

    def x0(self, s: int) -> float:
        return self.x0_plus if s > 0 else self.x0_minus

    def bias(self, s: int) -> float:
        return self.bias_plus if s > 0 else self.bias_minus

    @property
    def x0_max(self) -> float:
        return max(abs(self.x0_plus), abs(self.x0_minus))


def _check_frequencies(p: ModelParams) -> None:
    for name in ("omega", "Omega", "g1", "g2", "chi"):
        value = getattr(p, name)
        if not math.isfinite(value):
            raise InvalidParams(f"{name} must be finite, got {value!r}")
    if p.omega <= 0.0:
        raise InvalidParams(f"omega must be positive, got {p.omega!r}")
    if p.Omega <= 0.0:
        raise InvalidParams(f"Omega must be positive, got {p.Omega!r}")


def _inverse(value: float, what: str) -> float:
    if value == 0.0:
        raise DegenerateScaleError(f"{what} is singular for these parameters")
    return 1.0 / value


def derive_scales(p: ModelParams) -> DerivedScales:
    """Evaluate every derived scale of the effective-oscillator picture.

    Raises DegenerateScaleError when |g2_tilde'| == 1, where the bias and
    eps0 diverge. Stability is *not* checked here; see :func:`validate`.
    """
    _check_frequencies(p)
    omega, chi = p.omega, p.chi
    g_s = p.g_s
    g_t = p.g_t
    g2t = p.g2_tilde
    g1p = math.sqrt(2.0) * p.g1 / omega
    g2p = 2.0 * p.g2 / omega
    g2tp = 2.0 * g2t / omega

    denom = 1.0 - g2tp * g2tp
    if denom == 0.0:
        raise DegenerateScaleError("|g2_tilde'| == 1: bias and eps0 diverge")

    mass_plus = _inverse(1.0 - g2p + chi * g2p, "mass_plus")
    mass_minus = _inverse(1.0 + g2p - chi * g2p, "mass_minus")
    vp2 = (1.0 + chi * g2p) ** 2 - g2p**2
    vm2 = (1.0 - chi * g2p) ** 2 - g2p**2
    x0_plus = -g1p / (1.0 + g2tp) if 1.0 + g2tp != 0.0 else math.inf
    x0_minus = g1p / (1.0 - g2tp) if 1.0 - g2tp != 0.0 else math.inf
    bias = g2tp * g1p * g1p / (2.0 * denom)

    return DerivedScales(
        g_s=g_s,
        g_t=g_t,
        g2_tilde=g2t,
        g1_prime=g1p,
        g2_prime=g2p,
        g2_tilde_prime=g2tp,
        gbar1=p.g1 / g_s,
        gbar2=g2t / g_t,
        mass_plus=mass_plus,
        mass_minus=mass_minus,
        varpi_plus=math.sqrt(vp2) if vp2 >= 0.0 else math.nan,
        varpi_minus=math.sqrt(vm2) if vm2 >= 0.0 else math.nan,
        x0_plus=x0_plus,
        x0_minus=x0_minus,
        bias_plus=bias,
        bias_minus=-bias,
        eps0=-(g1p * g1p / denom + 1.0) * omega / 2.0,
    )


def validate(p: ModelParams) -> None:
    """Raise if the Hamiltonian is not bounded below; return None otherwise.

    Strict inequalities, no tolerance band.
    """
    _check_frequencies(p)
    g2p = 2.0 * p.g2 / p.omega
    g2tp = 2.0 * p.g2_tilde / p.omega
    for s, label in ((1, "spin-up"), (-1, "spin-down")):
        # 1/m_s > 0 and m_s varpi_s^2 = 1 + s g2_tilde' > 0 together give a bounded branch
        inv_mass = 1.0 - s * g2p + s * p.chi * g2p
        stiffness = 1.0 + s * g2tp
        varpi_sq = (1.0 + s * p.chi * g2p) ** 2 - g2p**2
        if not (inv_mass > 0.0 and stiffness > 0.0 and varpi_sq > 0.0):
            raise SpectralCollapse(
                f"spectral collapse on the {label} branch: varpi^2={varpi_sq:.6g}, "
                f"g2_tilde'={g2tp:.6g}",
                branch=s,
            )
    if not abs(g2tp) < 1.0:
        raise SpectralCollapse(f"spectral collapse: |g2_tilde'|={abs(g2tp):.6g} >= 1")


_QUANTITY = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(gs|gt)?\s*$")


def parse_coupling(text, omega: float, Omega: float = 1.0) -> float:
    """Parse ``<float>``, ``<float>gs`` or ``<float>gt`` into energy units.

    The suffix multiplies by g_s = sqrt(omega Omega)/2 or g_t = omega/2 and
    binds tighter than the sign, so ``-1e-10gt`` is -(1e-10 g_t).
    Plain numbers (int/float) pass through unchanged.
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    m = _QUANTITY.match(str(text))
    if m is None:
        raise InvalidParams(f"cannot parse {text!r}; expected <float>, <float>gs or <float>gt")
    value = float(m.group(1))
    unit = m.group(2)
    if unit is None:
        return value
    if not (omega > 0.0 and Omega > 0.0):
        raise InvalidParams("unit suffixes need positive omega and Omega")
    scale = math.sqrt(omega * Omega) / 2.0 if unit == "gs" else omega / 2.0
    return value * scale
