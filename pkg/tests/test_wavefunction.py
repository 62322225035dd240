import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rabiq import (
    GridTooCoarse,
    ModelParams,
    classify_branch,
    compute_observables,
    derive_scales,
    evaluate_wavefunction,
    ground_state,
)
from rabiq.sweep import classify_solution
from rabiq.wavefunction import WaveGrid, hermite_functions, wavefunction_csv


def test_vacuum_components():
    sol = ground_state(ModelParams(omega=0.1))
    g = evaluate_wavefunction(sol)
    gauss = np.pi**-0.25 * np.exp(-g.x**2 / 2) / math.sqrt(2)
    # |psi> = psi+ |up> - psi- |down> with the (|up> - |down>)/sqrt(2) vacuum: both components equal
    assert np.allclose(np.abs(g.psi_plus), gauss, atol=1e-12)
    assert np.allclose(g.psi_plus, g.psi_minus, atol=1e-12)
    assert g.norm() == pytest.approx(1.0, abs=1e-6)
    cls = classify_branch(g)
    assert cls.label == "single"
    assert cls.asymmetry == pytest.approx(0.0, abs=1e-12)
    assert cls.peak_positions == pytest.approx((0.0,), abs=1e-9)


def test_doublet_profile_is_mirror_symmetric():
    p = ModelParams.from_reduced(0.001, 1.5, 0.0)
    sol = ground_state(p)
    g = evaluate_wavefunction(sol)
    assert np.allclose(np.abs(g.psi_plus), np.abs(g.psi_minus[::-1]), atol=1e-9)
    cls = classify_branch(g, derive_scales(p))
    assert cls.label == "double"
    assert len(cls.peak_positions) == 2
    assert cls.peak_positions[0] == pytest.approx(-cls.peak_positions[1], abs=0.1)


def test_broken_packet_on_one_side():
    p = ModelParams.from_reduced(0.001, 1.5, 1e-10)
    g = evaluate_wavefunction(ground_state(p))
    for comp in (g.psi_plus, g.psi_minus):
        w = comp**2
        right = w[g.x > 0].sum() / w.sum()
        assert right > 0.999 or right < 0.001
    assert classify_branch(g, derive_scales(p)).label == "broken"


def _rank(label):
    return {"single": 0, "double": 1, "broken": 2}[label]


def test_three_regimes_along_linear_coupling():
    labels = [classify_solution(ground_state(ModelParams.from_reduced(0.1, gb1, 1e-8))).label for gb1 in np.linspace(0.5, 2.0, 16)]
    ranks = [_rank(l) for l in labels]
    assert ranks == sorted(ranks)
    assert set(labels) == {"single", "double", "broken"}


def test_strong_two_photon_line_skips_double():
    labels = [classify_solution(ground_state(ModelParams.from_reduced(0.001, gb1, 0.3))).label for gb1 in np.arange(0.90, 1.0101, 0.01)]
    assert "double" not in labels
    assert labels[0] == "single" and labels[-1] == "broken"


def test_hermite_orthonormality():
    x = np.linspace(-32, 32, 6401)
    phi = hermite_functions(200, x)
    gram = phi @ phi.T * (x[1] - x[0])
    assert np.abs(gram - np.eye(201)).max() < 1e-8


def test_hermite_large_order_no_overflow():
    x = np.linspace(-150, 150, 7)
    phi = hermite_functions(5000, x)
    assert np.all(np.isfinite(phi))


def _two_gauss(x, a, b, wa, wb):
    return np.sqrt(wa * np.exp(-(x - a) ** 2) + wb * np.exp(-(x - b) ** 2))


@given(st.floats(-15, 15), st.floats(-15, 15), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_classification_mirror_invariant(a, b, wa, wb):
    x = np.linspace(-25, 25, 2001)
    amp = _two_gauss(x, a, b, wa, wb)
    amp /= math.sqrt((amp**2).sum() * (x[1] - x[0]))
    g = WaveGrid(x, amp / math.sqrt(2), amp / math.sqrt(2))
    m = WaveGrid(x, g.psi_plus[::-1].copy(), g.psi_minus[::-1].copy())
    c, cm = classify_branch(g), classify_branch(m)
    assert c.label == cm.label
    assert c.peak_count == cm.peak_count
    assert cm.asymmetry == pytest.approx(-c.asymmetry, abs=1e-9)


@given(st.floats(0.05, 0.5), st.floats(0.2, 2.0), st.floats(0.01, 0.9))
def test_asymmetry_follows_displacement_sign(omega, gb1, gb2):
    p = ModelParams.from_reduced(omega, gb1, gb2)
    sol = ground_state(p)
    if sol.degenerate:
        return
    a = classify_solution(sol).asymmetry
    d = compute_observables(sol, p).displacement
    if abs(a) > 1e-9 and abs(d) > 1e-9:
        assert np.sign(a) == np.sign(d)


def test_grid_too_coarse():
    sol = ground_state(ModelParams.from_reduced(0.1, 1.0, 0.2))
    with pytest.raises(GridTooCoarse):
        evaluate_wavefunction(sol, -1.0, 1.0, 200)
    with pytest.raises(GridTooCoarse):
        evaluate_wavefunction(sol, n_points=10)


def test_csv_export():
    g = evaluate_wavefunction(ground_state(ModelParams(omega=0.1)), -5, 5, 101)
    text = wavefunction_csv(g)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x", "psi_plus", "psi_minus", "density"]
    assert len(rows) == 102
    assert text.endswith("\r\n")
    assert all(len(v.lstrip("-").replace(".", "").split("e")[0].lstrip("0")) <= 6 for v in rows[50])
