import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import dense_hamiltonian
from rabiq import BasisSpec, ModelParams, TruncationPolicy, compute_observables, ground_state, solve_fixed
from rabiq.eigensolve import degeneracy_threshold, extremal_eigenpairs, spectral_scale
from rabiq.fockspace import BandedSymMatrix, build_hamiltonian, build_parity_sector


def test_decoupled_vacuum_pair():
    m = build_hamiltonian(ModelParams(omega=0.1), BasisSpec(5))
    (val, vec), _ = extremal_eigenpairs(m, k=2)
    assert val == pytest.approx(-0.5, abs=1e-14)
    expected = np.zeros(m.dim)
    expected[0], expected[1] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    assert abs(abs(vec @ expected) - 1.0) < 1e-12


@pytest.mark.parametrize("method", ["dense", "lanczos"])
@pytest.mark.parametrize("seed", range(4))
def test_random_banded_against_dense(method, seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(40, 400))
    bands = rng.normal(size=(5, dim))
    m = BandedSymMatrix(bands)
    w = np.linalg.eigvalsh(m.to_dense())
    pairs = extremal_eigenpairs(m, k=3, method=method)
    for (val, vec), ref in zip(pairs, w[:3]):
        assert val == pytest.approx(ref, rel=1e-10, abs=1e-10 * np.abs(w).max())
        assert np.linalg.norm(m.to_dense() @ vec - val * vec) < 1e-9 * np.abs(w).max()


def test_lowest_pair_matches_parity_sectors():
    p = ModelParams.from_reduced(0.1, 1.2, 0.0)
    b = BasisSpec(150)
    full = extremal_eigenpairs(build_hamiltonian(p, b), k=2, method="lanczos", shift=-2.0)
    sectors = sorted(np.linalg.eigvalsh(build_parity_sector(p, b, s).to_dense())[0] for s in ("even", "odd"))
    assert full[0][0] == pytest.approx(sectors[0], abs=1e-10)
    assert full[1][0] == pytest.approx(sectors[1], abs=1e-10)


def test_decoupled_ground_state_first_rung():
    pol = TruncationPolicy()
    sol = ground_state(ModelParams(omega=0.1), pol)
    assert sol.energy == pytest.approx(-0.5, abs=1e-14)
    assert sol.n_max_used == pol.n_initial


def test_against_dense_oracle_large_truncation():
    p = ModelParams.from_reduced(0.1, 1.5, 0.3)
    sol = ground_state(p)
    w = np.linalg.eigvalsh(dense_hamiltonian(p, 300))
    assert sol.energy == pytest.approx(w[0], abs=1e-9)


def test_symmetry_breaking_working_point():
    p = ModelParams.from_reduced(0.001, 1.5, 1e-10)
    sol = ground_state(p)
    obs = compute_observables(sol, p)
    assert math.isfinite(obs.sigma_z) and obs.sigma_z < -0.5
    # bias splitting 2|b| omega resolves the doublet
    assert sol.gap > degeneracy_threshold(p, sol.n_max_used)
    assert not sol.degenerate
    assert obs.reliable


def _check_solution(sol):
    assert np.linalg.norm(sol.coeffs) == pytest.approx(1.0, abs=1e-12)
    assert sol.residual <= 1e-10 * sol.spectral_scale
    assert sol.gap >= 0
    assert sol.degenerate == (sol.gap < degeneracy_threshold(sol.params_echo, sol.n_max_used, sol.basis_shift))
    energies = [e for _, e in sol.ladder]
    assert all(b <= a + 1e-12 * abs(a) for a, b in zip(energies, energies[1:]))


@given(st.floats(0.05, 1.0), st.floats(0.0, 2.5), st.floats(-0.9, 0.9), st.sampled_from([0.0, 1.0]))
def test_solution_invariants(omega, gb1, gb2, chi):
    _check_solution(ground_state(ModelParams.from_reduced(omega, gb1, gb2, chi=chi)))


def test_determinism_bit_identical():
    p = ModelParams.from_reduced(0.01, 1.3, 0.2)
    a, b = ground_state(p), ground_state(p)
    assert a.energy == b.energy
    assert np.array_equal(a.coeffs, b.coeffs)


def test_zero_two_photon_routes_through_sectors():
    p = ModelParams.from_reduced(0.001, 1.5, 0.0)
    sol = ground_state(p)
    assert sol.sector in ("even", "odd")
    assert compute_observables(sol, p).sigma_z == 0.0


def test_displaced_basis_matches_plain_solve():
    p = ModelParams.from_reduced(0.01, 1.6, 0.4)
    plain = solve_fixed(p, 400)
    alpha = 0.8 * math.sqrt(p.g1**2) / p.omega  # any real shift spans the same space in the limit
    moved = solve_fixed(p, 400, basis_shift=alpha)
    assert moved.energy == pytest.approx(plain.energy, abs=1e-10)
    a, b = compute_observables(plain, p), compute_observables(moved, p)
    for name in ("sigma_z", "sigma_x", "photon_number", "displacement", "spp_correlation", "tpp_correlation", "p2_ratio"):
        assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-7, abs=1e-9)


def test_large_displacement_point_converges():
    p = ModelParams.from_reduced(0.001, 2.0, 0.995)
    sol = ground_state(p)
    assert sol.basis_shift != 0.0
    assert sol.n_max_used < 2048
    _check_solution(sol)


def test_spectral_scale_definition():
    p = ModelParams(omega=0.1, Omega=1.0, g1=0.3, g2=0.01)
    assert spectral_scale(p, 100) == max(1.0, 0.1 * 100, 0.3 * 10, 0.01 * 100)
