"""Ground-state expectation values from Fock-basis coefficients."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedForZeroG2, VanishingWeight
from .model import DerivedScales, ModelParams, derive_scales

__all__ = [
    "ObservableSet",
    "compute_observables",
    "spin_filtered_displacement",
    "sigma_z_ntilde",
]


@dataclass(frozen=True)
class ObservableSet:
    sigma_z: float
    sigma_x: float
    photon_number: float
    displacement: float
    spp_correlation: float
    tpp_correlation: float
    p2_ratio: float
    rho_plus: float
    rho_minus: float
    x_tilde_plus: float | None
    x_tilde_minus: float | None
    reliable: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _x_moment(c: np.ndarray) -> float:
    """<c|(a^dag + a)|c> for a single spin component."""
    n = np.arange(1, c.size)
    return 2.0 * float(np.sum(c[:-1] * c[1:] * np.sqrt(n)))


def _pair_moment(c: np.ndarray) -> float:
    """<c|(a^dag)^2 + a^2|c> for a single spin component."""
    n = np.arange(c.size - 2)
    return 2.0 * float(np.sum(c[:-2] * c[2:] * np.sqrt((n + 1.0) * (n + 2.0))))


def _shifted(c: np.ndarray, alpha: float):
    """(weight, <a^dag a>, <a^dag + a>, <a^dag^2 + a^2>) of one spin component.

    The coefficients live in the Fock basis of b = a - alpha (alpha real).
    """
    n = np.arange(c.size, dtype=float)
    rho = float(c @ c)
    num = float(n @ (c * c))
    x = _x_moment(c)
    pair = _pair_moment(c)
    if alpha:
        num += alpha * x + alpha * alpha * rho
        pair += 2.0 * alpha * x + 2.0 * alpha * alpha * rho
        x += 2.0 * alpha * rho
    return rho, num, x, pair


def sigma_z_ntilde(sol) -> float:
    """<sigma_z (a^dag a + a a^dag)>; only needed to check dE/dg2 when chi != 0."""
    alpha = sol.basis_shift
    rp, np_, _, _ = _shifted(sol.up, alpha)
    rm, nm, _, _ = _shifted(sol.down, alpha)
    return (2.0 * np_ + rp) - (2.0 * nm + rm)


def spin_filtered_displacement(sol, scales: DerivedScales):
    """Renormalized displacement of each spin component.

    x_tilde_s = <a^dag + a>_s / (sqrt(2) rho_s |x0_q|) with q = sign(-g2_tilde),
    i.e. the spin-down minimum x0_minus for g2_tilde > 0 and x0_plus otherwise.
    ``<.>_s`` is the unnormalized expectation within the spin-s component.
    """
    if scales.g2_tilde == 0.0:
        raise UndefinedForZeroG2("spin-filtered displacement needs g2_tilde != 0")
    x0 = abs(scales.x0_minus if scales.g2_tilde > 0 else scales.x0_plus)
    alpha = sol.basis_shift
    out = []
    for comp in (sol.up, sol.down):
        rho, _, x_mom, _ = _shifted(comp, alpha)
        if rho <= 1e-14:
            raise VanishingWeight(f"spin component weight {rho:.3g} too small")
        if x0 == 0.0:
            # no linear coupling: no displacement scale and no displacement
            out.append(0.0)
            continue
        out.append(x_mom / (math.sqrt(2.0) * rho * x0))
    return tuple(out)


def compute_observables(sol, p: ModelParams | None = None) -> ObservableSet:
    p = p or sol.params_echo
    alpha = sol.basis_shift
    up, dn = sol.up, sol.down
    rho_plus, n_up, x_up, a2_up = _shifted(up, alpha)
    rho_minus, n_dn, x_dn, a2_dn = _shifted(dn, alpha)
    photons = n_up + n_dn
    pair_total = a2_up + a2_dn
    # <p^2> = (<a^dag a> + <a a^dag> - <a^dag a^dag> - <a a>)/2, ground reference 1/2
    p2_ratio = 2.0 * photons + 1.0 - pair_total

    xt_plus = xt_minus = None
    scales = derive_scales(p)
    if scales.g2_tilde != 0.0:
        try:
            xt_plus, xt_minus = spin_filtered_displacement(sol, scales)
        except VanishingWeight:
            xt_plus = xt_minus = None
    return ObservableSet(
        sigma_z=rho_plus - rho_minus,
        sigma_x=2.0 * float(up @ dn),
        photon_number=photons,
        displacement=x_up + x_dn,
        spp_correlation=x_up - x_dn,
        tpp_correlation=a2_up - a2_dn,
        p2_ratio=p2_ratio,
        rho_plus=rho_plus,
        rho_minus=rho_minus,
        x_tilde_plus=xt_plus,
        x_tilde_minus=xt_minus,
        reliable=(not sol.degenerate) or sol.sector is not None,
    )
