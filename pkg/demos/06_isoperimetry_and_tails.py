"""Gaussian isoperimetry at desk scale: half-spaces, sigma, shift conditions.

Run with:  python demos/06_isoperimetry_and_tails.py
"""

import numpy as np

from roughvar.gaussian import RngSeed
from roughvar.tails import (
    GaussianSurrogate,
    borell_halfspace_check,
    fernique_sigma,
    fit_tail,
    shift_condition_probe,
)

# ---------------------------------------------------------------------------
# Enlarging a half-space {x_1 <= a} by r unit balls of the shift space gives
# {x_1 <= a + r} exactly, so the isoperimetric lower bound holds with
# equality and Monte Carlo should land within a few standard errors.
print("dim  a     r     exact     estimate  |diff|/SE")
for dim in (2, 10):
    for a, r in ((-1.0, 0.5), (0.0, 1.0), (1.0, 2.0)):
        chk = borell_halfspace_check(a, r, dim, 200_000, RngSeed(8, dim * 10 + int(2 * r)))
        z = abs(chk.estimate - chk.exact_bound) / chk.stderr
        print(f"{dim:3d} {a:5.1f} {r:5.1f}  {chk.exact_bound:.5f}  {chk.estimate:.5f}  {z:6.2f}")

# ---------------------------------------------------------------------------
# The tail scale sigma is the largest one-dimensional standard deviation;
# with it, any norm-like functional obeying the shift condition
# |f(b)| <= c (|f(b - h)| + sigma |h|_H) inherits a Gaussian tail with
# exponent up to 1/(2 c^2 sigma^2).
cov = np.diag([4.0, 1.0, 0.25])
surrogate = GaussianSurrogate(cov)
print("\nsigma of diag(4, 1, 1/4):", fernique_sigma(surrogate))

probe = shift_condition_probe(
    np.linalg.norm,
    GaussianSurrogate(np.eye(3)),
    c=1.0,
    n_samples=2_000,
    h_grid=[np.ones(3), np.array([2.0, -1.0, 0.5])],
    seed=RngSeed(9),
)
print("shift-condition violation for the Euclidean norm (c = 1):", probe.max_violation)

# The end-to-end story: |b| under the identity covariance has sigma = 1 and
# c = 1, so its squared-exponential tail exponent should approach 1/2.
samples = np.abs(np.random.default_rng(10).standard_normal(100_000))
rep = fit_tail(samples)
print(f"\n|Z| tail: model={rep.model}, eta={rep.eta:.3f} (threshold 1/2), quality={rep.quality:.4f}")
