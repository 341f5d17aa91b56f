"""Generalized variation: the psi/phi families, exact grid suprema, norms.

Run with:  python demos/02_variation_functionals.py
"""

import numpy as np

from roughvar import regularity as reg
from roughvar import variation as var

rng = np.random.default_rng(1)

# ---------------------------------------------------------------------------
# The iterated-log family psi_{p,2}(x) = (x / sqrt(log log 1/x))**p matches
# x**p away from zero (the log clamps to 1) but is strictly smaller near 0.
f22 = reg.psi(2.0, 2)
for x in (0.5, 0.06, 1e-3, 1e-8):
    print(f"psi_22({x:g}) = {reg.evaluate(f22, x):.3e}   x^2 = {x**2:.3e}")

# Inverses fall back to monotone bisection when no closed form exists.
y = 1e-4
x = reg.inverse(f22, y)
print("inverse check: psi_22(psi_22^-1(y)) relative error:",
      abs(reg.evaluate(f22, x) - y) / y)

# ---------------------------------------------------------------------------
# The variation functional V_f is the exact maximum of sum f(|increment|)
# over all grid dissections, found by dynamic programming.  The brute-force
# oracle enumerates every dissection and agrees bit for bit.
vals = np.cumsum(rng.standard_normal(10) * 0.6)
path = var.SampledPath.euclidean(np.linspace(0, 1, 10), vals)
dp = var.psi_variation(path, f22)
bf = var.psi_variation_bruteforce(path, f22)
print("DP value:", dp.value, " brute force:", bf.value, " equal:", dp.value == bf.value)
print("optimal dissection (grid indices):", dp.dissection)

# Convexity of x**2 merges aligned increments: a monotone staircase achieves
# its variation on the two endpoints alone.
stairs = var.SampledPath.euclidean(np.linspace(0, 1, 6), np.linspace(0, 1, 6))
print("monotone path, f = x^2:", var.psi_variation(stairs, reg.power(2.0)).dissection)

# ---------------------------------------------------------------------------
# The variation *norm* is the infimal eps with V_f(x / eps) <= 1.  For
# f = x**p it reproduces the classical p-variation norm exactly.
p = 2.0
nrm = var.psi_variation_norm(path, reg.power(p))
print("p-var norm vs V^(1/p):", nrm, var.psi_variation(path, reg.power(p)).value ** (1 / p))

# ---------------------------------------------------------------------------
# Restricting the dissection mesh can only lower the supremum, and it
# reveals the fine-scale structure the coarse optimum hides.
for delta in (1.0, 0.5, 0.25, 0.125):
    out = var.mesh_limited_variation(path, f22, delta)
    print(f"mesh <= {delta:5.3f}: V = {out.value:.4f}  (dissection mesh used {out.mesh:.3f})")

# ---------------------------------------------------------------------------
# Variation over a window is a superadditive function of the window: the
# control-function check scans all grid triples for violations.
omega = var.ControlFunction.from_psi_variation(path, f22)
print("superadditivity violation:", var.superadditivity_check(omega).max_violation)

# 2D covariance variation: Brownian motion has exactly unit 1-variation.
bm_cov = lambda s, t: np.minimum(s, t)
print("covariance 1-variation of BM:", var.covariance_rho_variation(bm_cov, np.linspace(0, 1, 16), 1.0))
