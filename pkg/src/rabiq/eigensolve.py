"""Ground state of the banded Hamiltonian with certified truncation.

The workhorse is a shift-invert Lanczos iteration: ``(H - sigma)`` is
factorized once in band form (Cholesky when the shift sits below the
spectrum, banded LU otherwise) and the Krylov basis is fully
reorthogonalized. The converged Ritz vectors get a final Rayleigh-Ritz pass
with ``H`` itself, which is what separates nearly degenerate doublets.

For the Rabi Hamiltonian the semiclassical energy is a rigorous lower bound
of the spectrum (kinetic terms are positive for every stable parameter set),
so the default shift always yields a positive definite factorization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from .errors import FactorizationSingular, NoConvergence, TruncationCapExceeded
from .fockspace import (
    BandedSymMatrix,
    BasisSpec,
    apply,
    build_hamiltonian,
    build_parity_sector,
    sector_to_full,
)
from .model import ModelParams, derive_scales, validate

__all__ = [
    "TruncationPolicy",
    "GroundSolution",
    "extremal_eigenpairs",
    "ground_state",
    "solve_fixed",
    "spectral_scale",
    "degeneracy_threshold",
    "DENSE_LIMIT",
]

DENSE_LIMIT = 512
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TruncationPolicy:
    n_initial: int = 32
    growth_factor: float = 1.5
    energy_tol: float | None = None  # absolute; None means 1e-10 * Omega
    tail_tol: float = 1e-12
    n_cap: int = 16384
    n_fixed: int | None = None  # bypass the adaptive ladder

    def __post_init__(self):
        if self.n_initial < 8:
            raise ValueError("n_initial must be >= 8")
        if self.growth_factor < 1.5:
            raise ValueError("growth_factor must be >= 1.5")
        if self.n_cap < self.n_initial:
            raise ValueError("n_cap must be >= n_initial")
        if self.n_fixed is not None and self.n_fixed < 2:
            raise ValueError("n_fixed must be >= 2")

    def energy_tolerance(self, p: ModelParams) -> float:
        return 1e-10 * p.Omega if self.energy_tol is None else self.energy_tol


@dataclass(frozen=True, eq=False)
class GroundSolution:
    energy: float
    excited_energy: float
    coeffs: np.ndarray
    n_max_used: int
    residual: float
    degenerate: bool
    params_echo: ModelParams
    sector: str | None = None
    ladder: tuple = field(default=())
    basis_shift: float = 0.0  # Fock states are those of a - basis_shift

    @property
    def gap(self) -> float:
        return self.excited_energy - self.energy

    @property
    def spectral_scale(self) -> float:
        return spectral_scale(self.params_echo, self.n_max_used, self.basis_shift)

    @property
    def up(self) -> np.ndarray:
        return self.coeffs[0::2]

    @property
    def down(self) -> np.ndarray:
        return self.coeffs[1::2]


def spectral_scale(p: ModelParams, n_max: int, basis_shift: float = 0.0) -> float:
    """max(Omega, omega n, |g1| sqrt(n), |g2| n), plus the constant a displaced basis adds."""
    scale = max(p.Omega, p.omega * n_max, abs(p.g1) * math.sqrt(n_max), abs(p.g2) * n_max)
    if basis_shift:
        a = abs(basis_shift)
        scale = max(scale, p.omega * a * a + 2.0 * abs(p.g1) * a + 2.0 * abs(p.g2_tilde) * a * a)
    return scale


def degeneracy_threshold(p: ModelParams, n_max: int, basis_shift: float = 0.0) -> float:
    return 100.0 * EPS * spectral_scale(p, n_max, basis_shift)


# ---------------------------------------------------------------------------
# factorization of (H - sigma)
# ---------------------------------------------------------------------------


class _ShiftedSolver:
    """Reusable solve with (A - sigma I) in band form."""

    def __init__(self, m: BandedSymMatrix, sigma: float):
        self.sigma = sigma
        kd = m.half_bandwidth
        n = m.dim
        ab = np.array(m.bands, dtype=float)
        ab[0] -= sigma
        try:
            self._chol = linalg.cholesky_banded(ab, lower=True, check_finite=False)
            self.kind = "cholesky"
            return
        except linalg.LinAlgError:
            self._chol = None
        # symmetric indefinite: general banded LU in LAPACK storage
        gb = np.zeros((3 * kd + 1, n))
        for k in range(kd + 1):
            d = ab[k, : n - k]
            gb[2 * kd + k, : n - k] = d  # sub-diagonal k: A[j + k, j]
            gb[2 * kd - k, k:] = d  # super-diagonal k: A[j, j + k]
        lu, piv, info = lapack.dgbtrf(gb, kd, kd)
        if info > 0:
            raise FactorizationSingular(f"shift {sigma!r} hits an eigenvalue (pivot {info})")
        if info < 0:
            raise ValueError(f"dgbtrf argument error {info}")
        self._lu, self._piv, self._kd = lu, piv, kd
        self.kind = "lu"

    def __call__(self, b: np.ndarray) -> np.ndarray:
        if self._chol is not None:
            return linalg.cho_solve_banded((self._chol, True), b, check_finite=False)
        x, info = lapack.dgbtrs(self._lu, self._kd, self._kd, b, self._piv)
        if info != 0:
            raise FactorizationSingular(f"dgbtrs failed with info={info}")
        return x


def _fix_sign(v: np.ndarray) -> np.ndarray:
    s = v.sum()
    if abs(s) <= 1e-8 * math.sqrt(v.size) * np.max(np.abs(v)):
        s = v[np.argmax(np.abs(v))]
    return -v if s < 0 else v


def _rayleigh_ritz(m: BandedSymMatrix, Y: np.ndarray):
    """Orthonormalize the columns of Y and diagonalize H on their span."""
    Q, _ = np.linalg.qr(Y)
    HQ = apply(m, Q)
    G = Q.T @ HQ
    G = 0.5 * (G + G.T)
    vals, S = np.linalg.eigh(G)
    X = Q @ S
    HX = HQ @ S
    res = np.linalg.norm(HX - X * vals, axis=0)
    return vals, X, res


def _dense_pairs(m: BandedSymMatrix, k: int):
    vals, vecs = np.linalg.eigh(m.to_dense())
    return [(float(vals[i]), _fix_sign(vecs[:, i].copy())) for i in range(k)]


def _lanczos_shift_invert(m, k, tol, scale, sigma, max_krylov, max_restarts):
    n = m.dim
    solver = None
    for attempt in range(6):
        try:
            solver = _ShiftedSolver(m, sigma)
            break
        except FactorizationSingular:
            sigma -= (1.0 + attempt) * 1e-7 * scale
    if solver is None:
        raise FactorizationSingular("could not factorize H - sigma after perturbing the shift")

    m_max = min(n, max_krylov)
    start = np.ones(n) / math.sqrt(n)
    best = math.inf
    iterations = 0
    target = tol * scale
    V = np.empty((m_max + 1, n))
    for restart in range(max_restarts + 1):
        V[0] = start
        alpha = np.zeros(m_max)
        beta = np.zeros(m_max)
        j_used = 0
        for j in range(m_max):
            iterations += 1
            w = solver(V[j])
            a = V[j] @ w
            w -= a * V[j]
            if j:
                w -= beta[j - 1] * V[j - 1]
            # two passes of classical Gram-Schmidt keep the basis orthogonal to working precision
            Vj = V[: j + 1]
            w -= Vj.T @ (Vj @ w)
            w -= Vj.T @ (Vj @ w)
            b = np.linalg.norm(w)
            alpha[j] = a
            beta[j] = b
            j_used = j + 1
            exhausted = b <= 1e-14 * max(abs(a), 1.0)
            if j_used >= k and (exhausted or j_used % 4 == 0 or j_used == m_max):
                theta, S = linalg.eigh_tridiagonal(alpha[:j_used], beta[: j_used - 1])
                order = np.argsort(theta)[::-1][:k]
                est = b * np.abs(S[-1, order]) / np.maximum(np.abs(theta[order]), 1e-300)
                if exhausted or np.all(est * scale <= 1e3 * target) or j_used == m_max:
                    Y = Vj.T @ S[:, order]
                    vals, X, res = _rayleigh_ritz(m, Y)
                    best = min(best, float(np.max(res)))
                    if np.all(res <= target):
                        return [(float(vals[i]), _fix_sign(X[:, i].copy())) for i in range(k)], iterations
                    if exhausted or j_used == m_max:
                        start = X.sum(axis=1)
                        start /= np.linalg.norm(start)
                        break
            if exhausted:
                break
            V[j + 1] = w / b
    raise NoConvergence(
        f"shift-invert Lanczos did not reach residual {target:.3g}",
        iterations=iterations,
        best_residual=best,
    )


def extremal_eigenpairs(
    m: BandedSymMatrix,
    k: int = 2,
    tol: float = 1e-12,
    shift: float | None = None,
    scale: float | None = None,
    method: str = "auto",
    max_krylov: int = 160,
    max_restarts: int = 8,
):
    """Return the ``k`` lowest eigenpairs of a banded symmetric matrix.

    Pairs come back sorted by value; each vector has unit norm and a
    deterministic sign (positive overlap with the all-ones vector). The
    residual of every pair is at most ``tol * scale``, where ``scale``
    defaults to a Gershgorin bound of ``|m|``.

    ``method`` is ``"auto"`` (dense for dim <= 512), ``"dense"`` or
    ``"lanczos"``. Without an explicit ``shift`` the Gershgorin lower bound
    is used, which is safe but converges slowly.
    """
    if not 1 <= k <= 4:
        raise ValueError("k must be between 1 and 4")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if k > m.dim:
        raise ValueError("k exceeds the matrix dimension")
    if scale is None:
        scale = max(m.norm_bound(), 1e-300)
    if method == "dense" or (method == "auto" and m.dim <= DENSE_LIMIT):
        return _dense_pairs(m, k)
    if method not in ("auto", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if shift is None:
        lo, hi = m.gershgorin_bounds()
        shift = lo - 1e-3 * max(hi - lo, 1.0)
    pairs, _ = _lanczos_shift_invert(m, k, tol, scale, shift, max_krylov, max_restarts)
    return pairs


# ---------------------------------------------------------------------------
# adaptive ground state
# ---------------------------------------------------------------------------


# undisplaced truncations above this size try a basis centred on the semiclassical minimum
DISPLACE_ABOVE = 2048
# wells higher than this many omega above the global minimum carry no ground-state weight
WELL_WINDOW = 50.0


def _nmax_for_span(span: float, n_initial: int) -> int:
    half = span * span / 2.0
    return max(n_initial, math.ceil(half + 10.0 * math.sqrt(half) + 20.0))


def _initial_nmax(p: ModelParams, policy: TruncationPolicy) -> int:
    return _nmax_for_span(derive_scales(p).x0_max, policy.n_initial)


def _semiclassical(p: ModelParams):
    from .analytic import semiclassical_energy

    return semiclassical_energy(p)


def _shift_for(p: ModelParams, sc=None) -> float:
    sc = sc or _semiclassical(p)
    return sc.energy - 0.5 * p.omega


def _plan(p: ModelParams, policy: TruncationPolicy, sc) -> tuple[float, int]:
    """(basis_shift, starting n_max) for the adaptive ladder.

    The plain start covers every spin potential minimum x0_s. When that
    exceeds DISPLACE_ABOVE levels, the basis is centred on the semiclassical
    minimum instead, provided every low-lying well stays within a smaller
    truncation. Parity-symmetric points (g2 == 0) are never displaced.
    """
    n_plain = _initial_nmax(p, policy)
    if p.g2 == 0.0 or n_plain <= DISPLACE_ABOVE or sc.x_star == 0.0:
        return 0.0, n_plain
    window = WELL_WINDOW * p.omega
    wells = [x for x, e in sc.wells if e - sc.energy <= window]
    span = max((abs(x - sc.x_star) for x in wells), default=0.0)
    n_disp = _nmax_for_span(span, policy.n_initial)
    if n_disp >= n_plain:
        return 0.0, n_plain
    return sc.x_star / math.sqrt(2.0), n_disp


def _tail_weight(coeffs: np.ndarray, n_max: int) -> float:
    levels = n_max + 1
    top = max(1, levels // 10)
    tail = coeffs[2 * (levels - top):]
    return float(tail @ tail)


@dataclass(frozen=True)
class _Pass:
    n_max: int
    energy: float
    excited: float
    coeffs: np.ndarray
    sector: str | None
    basis_shift: float = 0.0


def _solve_pass(p: ModelParams, n_max: int, shift: float, tol: float, basis_shift: float = 0.0) -> _Pass:
    basis = BasisSpec(n_max)
    scale = spectral_scale(p, n_max, basis_shift)
    if p.g2 == 0.0 and basis_shift == 0.0:
        found = []
        for sector in ("even", "odd"):
            sm = build_parity_sector(p, basis, sector)
            pairs = extremal_eigenpairs(sm, k=2, tol=tol, shift=shift, scale=scale)
            found.extend((val, vec, sector) for val, vec in pairs)
        # stable sort: on exact ties the even sector wins
        found.sort(key=lambda t: t[0])
        e0, vec, sector = found[0]
        return _Pass(n_max, e0, found[1][0], sector_to_full(vec, sector), sector)
    h = build_hamiltonian(p, basis, basis_shift)
    pairs = extremal_eigenpairs(h, k=2, tol=tol, shift=shift, scale=scale)
    return _Pass(n_max, pairs[0][0], pairs[1][0], pairs[0][1], None, basis_shift)


def _finish(p: ModelParams, last: _Pass, ladder) -> GroundSolution:
    h = build_hamiltonian(p, BasisSpec(last.n_max), last.basis_shift)
    c = last.coeffs / np.linalg.norm(last.coeffs)
    residual = float(np.linalg.norm(apply(h, c) - last.energy * c))
    gap = max(last.excited - last.energy, 0.0)
    return GroundSolution(
        energy=last.energy,
        excited_energy=last.energy + gap,
        coeffs=c,
        n_max_used=last.n_max,
        residual=residual,
        degenerate=bool(gap < degeneracy_threshold(p, last.n_max, last.basis_shift)),
        params_echo=p,
        sector=last.sector,
        ladder=tuple(ladder),
        basis_shift=last.basis_shift,
    )


def solve_fixed(p: ModelParams, n_max: int, tol: float = 1e-12, basis_shift: float = 0.0) -> GroundSolution:
    """Ground state at a fixed truncation, no convergence ladder."""
    validate(p)
    last = _solve_pass(p, n_max, _shift_for(p), tol, basis_shift)
    return _finish(p, last, [(n_max, last.energy)])


def ground_state(p: ModelParams, policy: TruncationPolicy | None = None) -> GroundSolution:
    """Adaptive-truncation ground state.

    The truncation grows geometrically until the ground energy moves by less
    than ``energy_tol`` between consecutive rungs and the weight in the top
    10% of Fock levels is below ``tail_tol``. The first rung is compared
    against a solve at ``n / growth_factor``. At ``g2 == 0`` both parity
    sectors are solved separately and the lower one is returned, so that
    symmetry-odd observables vanish exactly.

    When the plain truncation would exceed ``DISPLACE_ABOVE`` levels the
    Fock basis is centred on the semiclassical minimum (see ``_plan``), and
    ``GroundSolution.basis_shift`` records the shift.
    """
    policy = policy or TruncationPolicy()
    validate(p)
    if policy.n_fixed is not None:
        return solve_fixed(p, policy.n_fixed)
    sc = _semiclassical(p)
    shift = _shift_for(p, sc)
    alpha, n = _plan(p, policy, sc)
    e_tol = policy.energy_tolerance(p)
    n = min(n, policy.n_cap)
    prev_n = max(2, math.ceil(n / policy.growth_factor))
    prev = _solve_pass(p, prev_n, shift, 1e-12, alpha)
    ladder = [(prev_n, prev.energy)]
    while True:
        cur = _solve_pass(p, n, shift, 1e-12, alpha)
        ladder.append((n, cur.energy))
        if abs(cur.energy - prev.energy) < e_tol and _tail_weight(cur.coeffs, n) < policy.tail_tol:
            return _finish(p, cur, ladder)
        if n >= policy.n_cap:
            raise TruncationCapExceeded(
                f"no convergence up to n_max={policy.n_cap} "
                f"(dE={abs(cur.energy - prev.energy):.3g}, tail={_tail_weight(cur.coeffs, n):.3g})"
            )
        prev = cur
        n = min(policy.n_cap, math.ceil(n * policy.growth_factor))
