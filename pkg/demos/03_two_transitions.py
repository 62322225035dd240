"""At omega = 0.1 and tiny g2 a g1 line crosses two distinct boundaries.

Boundary I (single -> double well) is continuous and shows up in the sigma_x
group of observables; boundary II (double well -> broken symmetry) is a jump
in sigma_z. Their analytic estimates are printed alongside.
"""
from rabiq import Axis, ModelParams, SweepSpec, detect_transitions, run_sweep
from rabiq.analytic import boundary_I, boundary_II
from rabiq.sweep import group_response

p = ModelParams.from_reduced(0.1, 0.0, 1e-8)
d = run_sweep(SweepSpec(axis1=Axis("g1", 0.5 * p.g_s, 2.5 * p.g_s, 201), fixed=p))

for t in detect_transitions(d):
    r = group_response(d, t)
    print(f"{t.kind:3s} at g1 = {t.location / p.g_s:.3f} g_s  (detectors: {', '.join(t.detectors)})")
    print(f"    sigma_x kink {r['sigma_x'].kink:.3g}, sigma_z jump {r['sigma_z'].delta:.3g}")

print(f"analytic I: {boundary_I(0.1, 1.0) / p.g_s:.4f} g_s")
# boundary II is a curve g2_tilde(g1): at this g2 the line meets it where the
# analytic value drops to 1e-8
for gb1 in (1.6, 1.8, 2.0, 2.2):
    print(f"analytic II at g1 = {gb1} g_s: g2_tilde = {boundary_II(0.1, 1.0, gb1):.2e} g_t")
