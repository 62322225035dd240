"""Banded Hamiltonian assembly in the truncated Fock x spin basis.

Basis ordering is interleaved: index = 2 n + s with s = 0 for spin up
(sigma_z = +1) and s = 1 for spin down. With this ordering sigma_x couples
offset 1, (a^dag + a) offset 2 and (a^dag)^2 + a^2 offset 4, so the
half-bandwidth is 4.

Band storage follows the LAPACK "lower" convention used by
``scipy.linalg.eig_banded(lower=True)`` and ``cholesky_banded(lower=True)``:
``bands[k, j] = H[j + k, j]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ParityBroken, TruncationTooSmall
from .model import ModelParams, validate

__all__ = [
    "BasisSpec",
    "BandedSymMatrix",
    "build_hamiltonian",
    "build_parity_sector",
    "sector_to_full",
    "apply",
    "parity_operator",
    "SECTORS",
]

SECTORS = ("even", "odd")


@dataclass(frozen=True)
class BasisSpec:
    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise TruncationTooSmall(f"n_max must be an integer >= 2, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    @staticmethod
    def index(n: int, s: int) -> int:
        return 2 * n + s


@dataclass(frozen=True, eq=False)
class BandedSymMatrix:
    """Real symmetric band matrix, lower storage ``bands[k, j] = A[j + k, j]``."""

    bands: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        b = np.asarray(self.bands, dtype=float)
        if b.ndim != 2:
            raise ValueError("bands must be a 2-d array (half_bandwidth + 1, dim)")
        b = b.copy()
        # entries hanging past the matrix edge carry no meaning; keep them zero
        for k in range(1, b.shape[0]):
            b[k, b.shape[1] - k:] = 0.0
        b.setflags(write=False)
        object.__setattr__(self, "bands", b)

    @property
    def dim(self) -> int:
        return self.bands.shape[1]

    @property
    def half_bandwidth(self) -> int:
        return self.bands.shape[0] - 1

    @classmethod
    def from_dense(cls, a: np.ndarray, half_bandwidth: int) -> "BandedSymMatrix":
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        bands = np.zeros((half_bandwidth + 1, n))
        for k in range(half_bandwidth + 1):
            bands[k, : n - k] = np.diagonal(a, -k)
        return cls(bands)

    def to_dense(self) -> np.ndarray:
        n = self.dim
        a = np.zeros((n, n))
        for k in range(self.half_bandwidth + 1):
            d = self.bands[k, : n - k]
            a += np.diag(d, -k)
            if k:
                a += np.diag(d, k)
        return a

    def diagonal(self, k: int = 0) -> np.ndarray:
        return self.bands[abs(k), : self.dim - abs(k)]

    def gershgorin_bounds(self) -> tuple[float, float]:
        n = self.dim
        radius = np.zeros(n)
        for k in range(1, self.half_bandwidth + 1):
            off = np.abs(self.bands[k, : n - k])
            radius[: n - k] += off
            radius[k:] += off
        d = self.bands[0]
        return float(np.min(d - radius)), float(np.max(d + radius))

    def norm_bound(self) -> float:
        lo, hi = self.gershgorin_bounds()
        return max(abs(lo), abs(hi))

    def __matmul__(self, v):
        return apply(self, v)


def apply(m: BandedSymMatrix, v) -> np.ndarray:
    """Multiply a banded symmetric matrix by a vector (or by columns of a 2-d array)."""
    v = np.asarray(v, dtype=float)
    n = m.dim
    if v.shape[0] != n:
        raise DimensionMismatch(f"vector of length {v.shape[0]} for a {n}x{n} matrix")
    b = m.bands
    if v.ndim == 1:
        out = b[0] * v
        for k in range(1, m.half_bandwidth + 1):
            d = b[k, : n - k]
            out[k:] += d * v[: n - k]
            out[: n - k] += d * v[k:]
        return out
    out = b[0][:, None] * v
    for k in range(1, m.half_bandwidth + 1):
        d = b[k, : n - k][:, None]
        out[k:] += d * v[: n - k]
        out[: n - k] += d * v[k:]
    return out


def build_hamiltonian(p: ModelParams, basis: BasisSpec, basis_shift: float = 0.0) -> BandedSymMatrix:
    """Pentadiagonal (half-bandwidth 4) Hamiltonian in the interleaved basis.

    With a nonzero real ``basis_shift`` alpha the Fock states are those of
    b = a - alpha, i.e. centred at x = sqrt(2) alpha. The band structure is
    unchanged; only the diagonal and the linear coupling pick up alpha.
    """
    validate(p)
    n_max = basis.n_max
    dim = basis.dim
    n = np.repeat(np.arange(n_max + 1, dtype=float), 2)
    sig = np.tile([1.0, -1.0], n_max + 1)
    al = float(basis_shift)
    g2t = p.g2_tilde

    bands = np.zeros((5, dim))
    bands[0] = p.omega * n + sig * p.g2 * p.chi * (2.0 * n + 1.0)
    if al != 0.0:
        bands[0] += p.omega * al * al + sig * (2.0 * p.g1 * al + 2.0 * g2t * al * al)
    # offset 1: (n, up) -- (n, down)
    bands[1, 0::2] = p.Omega / 2.0
    # offset 2: (n, s) -- (n + 1, s)
    linear = p.omega * al + sig[: dim - 2] * (p.g1 + 2.0 * g2t * al)
    bands[2, : dim - 2] = linear * np.sqrt(n[: dim - 2] + 1.0)
    # offset 4: (n, s) -- (n + 2, s)
    nn = n[: dim - 4]
    bands[4, : dim - 4] = sig[: dim - 4] * p.g2 * np.sqrt((nn + 1.0) * (nn + 2.0))
    return BandedSymMatrix(bands, meta={"params": p, "n_max": n_max, "sector": None, "basis_shift": al})


def _sector_spin(sector: str, n: np.ndarray) -> np.ndarray:
    """sigma_x eigenvalue attached to Fock level n within a parity sector."""
    if sector not in SECTORS:
        raise ValueError(f"sector must be 'even' or 'odd', got {sector!r}")
    alt = np.where(n % 2 == 0, 1.0, -1.0)
    # the even sector holds the decoupled ground state |0> (x) |-x>
    return -alt if sector == "even" else alt


def build_parity_sector(p: ModelParams, basis: BasisSpec, sector: str) -> BandedSymMatrix:
    """Tridiagonal Hamiltonian on one parity eigenspace (valid only at g2 = 0).

    The sector basis is |n, t_n> with t_n = -(-1)^n (even) or +(-1)^n (odd),
    where |+-x> are sigma_x eigenstates; the even sector contains |0, -x>.
    """
    if p.g2 != 0.0:
        raise ParityBroken("the two-photon term breaks parity; sector solve needs g2 == 0")
    validate(p)
    n = np.arange(basis.n_max + 1, dtype=float)
    t = _sector_spin(sector, n)
    bands = np.zeros((2, n.size))
    bands[0] = p.omega * n + t * p.Omega / 2.0
    # sigma_z |+-x> = |-+x>, so (a^dag + a) links neighbouring levels with unit spin overlap
    bands[1, :-1] = p.g1 * np.sqrt(n[:-1] + 1.0)
    return BandedSymMatrix(bands, meta={"params": p, "n_max": basis.n_max, "sector": sector})


def sector_to_full(vec: np.ndarray, sector: str) -> np.ndarray:
    """Embed a sector eigenvector into the interleaved (n, s) basis."""
    vec = np.asarray(vec, dtype=float)
    t = _sector_spin(sector, np.arange(vec.size))
    full = np.empty(2 * vec.size)
    amp = vec / np.sqrt(2.0)
    full[0::2] = amp
    full[1::2] = t * amp
    return full


def parity_operator(n_max: int) -> np.ndarray:
    """Dense photon-parity times spin-flip operator exp(i pi a^dag a) sigma_x."""
    dim = 2 * (n_max + 1)
    P = np.zeros((dim, dim))
    for n in range(n_max + 1):
        sign = 1.0 if n % 2 == 0 else -1.0
        P[2 * n, 2 * n + 1] = sign
        P[2 * n + 1, 2 * n] = sign
    return P
