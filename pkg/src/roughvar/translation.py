"""Young cross-integrals for piecewise-linear paths and the translation operator.

Both integrand and integrator are piecewise linear, so the per-segment
trapezoid identity evaluates every cross integral exactly; grids are merged
by union before integration and no interpolation error arises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nilpotent import GroupPath, group_path_interpolate
from .regularity import RegularityFunction, power
from .variation import SampledPath, psi_variation, psi_variation_norm

__all__ = [
    "CrossIntegrals",
    "TranslationBound",
    "young_cross_integrals",
    "translate",
    "translation_bound_ratio",
    "cameron_martin_norm",
]


@dataclass(frozen=True)
class CrossIntegrals:
    """The three cross integrals over a window, d x d arrays each."""

    x_dh: np.ndarray
    h_dx: np.ndarray
    h_dh: np.ndarray
    window: tuple[float, float]


def _interp_values(path: SampledPath, t: np.ndarray) -> np.ndarray:
    vals = path.values
    return np.column_stack([np.interp(t, path.times, vals[:, k]) for k in range(vals.shape[1])])


def _union_times(a: np.ndarray, b: np.ndarray, lo: float, hi: float) -> np.ndarray:
    t = np.union1d(a, b)
    t = t[(t >= lo) & (t <= hi)]
    if t.size == 0 or t[0] > lo:
        t = np.concatenate([[lo], t])
    if t[-1] < hi:
        t = np.concatenate([t, [hi]])
    return t


def young_cross_integrals(
    x: SampledPath, h: SampledPath, s: float, t: float
) -> CrossIntegrals:
    """Segment-exact cross integrals of two piecewise-linear paths over [s, t]."""
    if x.values.shape[1] != h.values.shape[1]:
        raise ValueError("paths must share the same state dimension")
    if not s < t:
        raise ValueError("need s < t")
    grid = _union_times(x.times, h.times, s, t)
    xv = _interp_values(x, grid)
    hv = _interp_values(h, grid)
    xc = xv - xv[0]
    hc = hv - hv[0]
    dx = np.diff(xv, axis=0)
    dh = np.diff(hv, axis=0)
    xm = 0.5 * (xc[:-1] + xc[1:])
    hm = 0.5 * (hc[:-1] + hc[1:])
    return CrossIntegrals(
        x_dh=np.einsum("ki,kj->ij", xm, dh),
        h_dx=np.einsum("ki,kj->ij", hm, dx),
        h_dh=np.einsum("ki,kj->ij", hm, dh),
        window=(s, t),
    )


def translate(y: GroupPath, h: SampledPath) -> GroupPath:
    """Translate a step-2 group path by a piecewise-linear perturbation.

    The level-1 path gains h; the level-2 path gains the running cross
    integrals of the pair.  The result lives on the union grid and its
    increments satisfy the multiplicative (Chen) identity by construction.
    """
    if y.level != 2:
        raise ValueError("translation is defined for step-2 group paths only")
    if h.metric != "euclidean" or h.values.shape[1] != y.dim:
        raise ValueError("the perturbation must be a vector path of matching dimension")
    grid = _union_times(y.times, h.times, y.times[0], y.times[-1])
    yu = y if np.array_equal(grid, y.times) else group_path_interpolate(y, grid)
    hv = _interp_values(h, grid)
    hc = hv - hv[0]

    # rebase the group path so the first point is the identity
    x0 = yu.levels[1][0]
    xc = yu.levels[1] - x0
    y2 = yu.levels[2] - yu.levels[2][0] - np.einsum("p,nq->npq", x0, xc)

    dx = np.diff(xc, axis=0)
    dh = np.diff(hc, axis=0)
    xm = 0.5 * (xc[:-1] + xc[1:])
    hm = 0.5 * (hc[:-1] + hc[1:])
    seg = (
        np.einsum("ki,kj->kij", xm, dh)
        + np.einsum("ki,kj->kij", hm, dx)
        + np.einsum("ki,kj->kij", hm, dh)
    )
    n, d = xc.shape
    cross = np.vstack([np.zeros((1, d, d)), np.cumsum(seg, axis=0)])
    levels = (np.ones(n), xc + hc, y2 + cross)
    for arr in levels:
        arr.setflags(write=False)
    return GroupPath(times=grid, levels=levels)


def cameron_martin_norm(h: SampledPath) -> float:
    """sqrt of the energy integral of a piecewise-linear path (sum |dh|^2/dt)."""
    dh = np.diff(h.values, axis=0)
    dt = np.diff(h.times)
    return float(np.sqrt(np.sum(np.sum(dh**2, axis=1) / dt)))


@dataclass(frozen=True)
class TranslationBound:
    lhs: float
    rhs: float
    ratio: float
    y_norm: float
    h_rho_norm: float


def translation_bound_ratio(
    y: GroupPath, h: SampledPath, f: RegularityFunction, rho: float
) -> TranslationBound:
    """Compare the translated path's variation norm against its natural bound.

    lhs is the f-variation norm of T_h(y); rhs adds the f-variation norm of
    y and the rho-variation norm of h.  The hypothesis 1/p + 1/rho > 1 is the
    caller's responsibility (Young pairing).
    """
    lhs = psi_variation_norm(SampledPath.from_group(translate(y, h), metric="cc"), f)
    y_norm = psi_variation_norm(SampledPath.from_group(y, metric="cc"), f)
    h_var = psi_variation(h, power(rho)).value ** (1.0 / rho)
    rhs = y_norm + h_var
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = 0.0 if lhs == 0 else float("inf")
    return TranslationBound(lhs=lhs, rhs=rhs, ratio=ratio, y_norm=y_norm, h_rho_norm=h_var)
