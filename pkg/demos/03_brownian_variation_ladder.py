"""Brownian variation across grid refinement: the iterated-log correction.

The exact variation scale of Brownian motion divides x**2 by log log(1/x).
On sample grids the corrected functional and the raw quadratic one track
each other closely (the optimum is carried by large increments, where the
correction clamps), and both drift upward at an iterated-log rate; the raw
functional's supremum is unbounded in the limit while the corrected one is
not, but at desk scales the gap opens extremely slowly.

Run with:  python demos/03_brownian_variation_ladder.py   (~1 minute)
"""

import numpy as np

from roughvar import regularity as reg
from roughvar import variation as var
from roughvar.gaussian import RngSeed, sample_bm

f22 = reg.psi(2.0, 2)
f2 = reg.power(2.0)
M = 20

print(" n      median V_psi22   median V_x^2   ratio")
for n in (256, 512, 1024, 2048, 4096):
    v_psi, v_pow = [], []
    for rep in range(M):
        path = sample_bm(n, 1, RngSeed(42, rep))
        v_psi.append(var.psi_variation(path, f22).value)
        v_pow.append(var.psi_variation(path, f2).value)
    mp, mq = np.median(v_psi), np.median(v_pow)
    print(f"{n:5d}   {mp:12.4f}   {mq:12.4f}   {mq / mp:.5f}")

print()
print("Both medians creep upward; the corrected functional's spread over the")
print("ladder stays well under a factor of two.  The small-increment region,")
print("where the iterated-log correction bites, contributes a vanishing share")
print("of the optimum at these grid sizes.")

# The mesh-limited view: force all increments under a shrinking bound to
# expose the fine-scale contribution that drives the limiting divergence.
path = sample_bm(4096, 1, RngSeed(42, 0))
print()
print("mesh bound   V_x^2 (mesh-limited)   V_psi22 (mesh-limited)")
for delta in (0.25, 0.0625, 0.015625, 0.00390625):
    vq = var.mesh_limited_variation(path, f2, delta).value
    vp = var.mesh_limited_variation(path, f22, delta).value
    print(f"{delta:10.6f}   {vq:10.4f}   {vp:22.4f}")
