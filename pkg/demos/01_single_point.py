"""One parameter point: ground state, observables and the shape of the wave packet.

Run with ``python demos/01_single_point.py``.
"""
import numpy as np

from rabiq import ModelParams, compute_observables, evaluate_wavefunction, classify_branch, ground_state

# Couplings are easiest to think about in units of the two natural scales:
# g_s = sqrt(omega Omega)/2 for the one-photon term, g_t = omega/2 for the
# two-photon term.
p = ModelParams.from_reduced(omega=0.01, gbar1=1.5, gbar2=0.2)
print(f"g_s = {p.g_s:.4f}, g_t = {p.g_t:.4f}, g1 = {p.g1:.4f}, g2 = {p.g2:.5f}")

sol = ground_state(p)
print(f"E0 = {sol.energy:.10f}, gap = {sol.gap:.3e}, Fock levels used = {sol.n_max_used}")

obs = compute_observables(sol, p)
for name in ("sigma_z", "sigma_x", "photon_number", "displacement"):
    print(f"  {name:14s} {getattr(obs, name):+.6f}")

# Real-space picture: the two spin components as functions of the
# oscillator coordinate x.
grid = evaluate_wavefunction(sol)
cls = classify_branch(grid)
print(f"branch = {cls.label}, peaks = {cls.peak_count}, asymmetry = {cls.asymmetry:+.3f}")
print(f"density maximum at x = {grid.x[np.argmax(grid.density)]:+.2f}")

# Flipping the sign of g2 mirrors the state: sigma_z changes sign, sigma_x does not.
mirror = compute_observables(ground_state(p.replace(g2=-p.g2)), p.replace(g2=-p.g2))
print(f"mirror: sigma_z {mirror.sigma_z:+.6f}, sigma_x {mirror.sigma_x:+.6f}")
