"""At small omega the sigma_z jump follows a circle in (g1/g_s, g2_tilde/g_t).

Numerically located jumps are compared with g1c = g_s sqrt(1 - (g2_tilde/g_t)^2),
and the jump heights with their closed forms.
"""
import math

from rabiq import ModelParams, compute_observables, ground_state, locate_boundary
from rabiq.analytic import boundary_lowfreq, jump_sigma_x, jump_sigma_z

omega = 0.001
print(" g2/g_t   numeric g1c/g_s   formula   d_sigma_z (formula)")
for r in (0.1, 0.3, 0.6, 0.9):
    p = ModelParams.from_reduced(omega, 0.0, r)
    g1c = boundary_lowfreq(omega, 1.0, 0.0, r * p.g_t)
    tp = locate_boundary(p, "g1", (0.5 * g1c, min(1.5 * g1c, 2 * p.g_s)), detector="SigmaZJump", tol=1e-5 * p.g_s)
    # crude jump: one step either side of the crossing. At weak g2 the finite-omega
    # crossover is wide, so this overshoots; tests/test_acceptance.py extrapolates instead.
    h = 0.01 * p.g_s
    lo = compute_observables(ground_state(p.replace(g1=tp.location - h)), p)
    hi = compute_observables(ground_state(p.replace(g1=tp.location + h)), p)
    print(f"  {r:4.1f}      {tp.location / p.g_s:.5f}        {g1c / p.g_s:.5f}   "
          f"{hi.sigma_z - lo.sigma_z:+.3f} ({jump_sigma_z(r, 1.0):+.3f})")

print("sigma_x jump at g2_tilde = 0.5 g_t:", round(jump_sigma_x(0.5, 1.0), 4))
