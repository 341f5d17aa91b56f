"""Tour of the truncated tensor group: lifts, Chen products, areas, dilation.

Run with:  python demos/01_signatures_and_group.py
"""

import numpy as np

from roughvar import nilpotent as nil

rng = np.random.default_rng(0)

# ---------------------------------------------------------------------------
# A piecewise-linear path in the plane and its step-2 lift.  The lift stores,
# per time, the running increments (level 1) and iterated integrals (level 2).
pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
gp = nil.lift_piecewise_linear(pts, level=2)
print("times:", gp.times)
print("level-1 at the end (closed loop, so zero):", gp.levels[1][-1])

# The antisymmetric part of level 2 is the signed area swept by the path;
# a unit square traversed counterclockwise encloses area 1.
area = nil.levy_area_increment(gp, 0.0, 1.0)
print("enclosed area:", area[0, 1])

# ---------------------------------------------------------------------------
# Chen's identity: the increment over a union of windows is the tensor
# product of the window increments.  This is what makes signatures additive
# over concatenation.
t = gp.times
left = gp.increment(t[0], t[2])
right = gp.increment(t[2], t[4])
whole = gp.increment(t[0], t[4])
chen = nil.multiply(left, right)
gap = max(np.max(np.abs(a - b)) for a, b in zip(whole.levels[1:], chen.levels[1:]))
print("Chen identity residual:", gap)

# ---------------------------------------------------------------------------
# The homogeneous norm counts level k with weight 1/k, so dilation (which
# scales level k by lambda**k) scales the norm exactly linearly.
g = gp.point(3)
print("homogeneous norm:", nil.homogeneous_norm(g))
for lam in (0.5, 2.0, -3.0):
    print(
        f"  dilation by {lam:+.1f}:",
        nil.homogeneous_norm(nil.dilate(g, lam)),
        "= |lambda| * norm:",
        abs(lam) * nil.homogeneous_norm(g),
    )

# ---------------------------------------------------------------------------
# Inverses come from the truncated Neumann series; the group product of an
# element with its inverse collapses to the identity at machine precision.
inv = nil.inverse(g)
prod = nil.multiply(g, inv)
print("g * g^-1 deviation from identity:", max(np.max(np.abs(lv)) for lv in prod.levels[1:]))

# A random wiggly path at step 4, exported and re-imported as JSON.
wiggle = nil.lift_piecewise_linear(np.cumsum(rng.standard_normal((16, 2)), axis=0), level=4)
back = nil.group_path_from_json(nil.group_path_to_json(wiggle))
print("JSON round-trip exact:", all(np.array_equal(a, b) for a, b in zip(wiggle.levels, back.levels)))
