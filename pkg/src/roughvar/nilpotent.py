"""Truncated tensor algebra, the step-N nilpotent group and signature lifts.

Group elements are stored densely, one coefficient array per tensor level
(level k holds d**k entries, level 0 is pinned to 1).  The Carnot theory
norm is replaced throughout by the equivalent homogeneous surrogate
``sum_k |g^k|**(1/k)``, which is exactly 1-homogeneous under dilation; the
surrogate is not symmetric in g <-> g^-1, so :func:`cc_distance` symmetrizes
by taking the larger of the two one-sided values.

Sizes are desk scale: dimension up to 4, level up to 5.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TensorGroupElement",
    "GroupPath",
    "identity",
    "element",
    "multiply",
    "inverse",
    "dilate",
    "homogeneous_norm",
    "cc_distance",
    "exp_tensor",
    "log_tensor",
    "lift_piecewise_linear",
    "levy_area_increment",
    "group_path_interpolate",
    "cc_distance_matrix",
    "area_distance_matrix",
    "read_path_csv",
    "write_path_csv",
    "group_path_to_json",
    "group_path_from_json",
]

MAX_DIM = 4
MAX_LEVEL = 5


def _check_size(dim: int, level: int) -> None:
    if not (1 <= dim <= MAX_DIM):
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {dim}")
    if not (1 <= level <= MAX_LEVEL):
        raise ValueError(f"level must be in [1, {MAX_LEVEL}], got {level}")


@dataclass(frozen=True)
class TensorGroupElement:
    """A point of the step-N group inside the truncated tensor algebra."""

    dim: int
    level: int
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        _check_size(self.dim, self.level)
        if len(self.levels) != self.level + 1:
            raise ValueError("need level + 1 coefficient arrays (including level 0)")
        if float(self.levels[0]) != 1.0:
            raise ValueError("level-0 coefficient must equal 1 exactly")
        for k, arr in enumerate(self.levels):
            if arr.shape != (self.dim,) * k:
                raise ValueError(f"level {k} array has shape {arr.shape}")

    def coefficient(self, word: tuple[int, ...]) -> float:
        """Coefficient of the tensor word (letters are 0-based axes)."""
        return float(self.levels[len(word)][word])


def element(levels) -> TensorGroupElement:
    """Build an element from per-level arrays (level-0 entry included)."""
    if len(levels) < 2:
        raise ValueError("need at least the level-0 scalar and a level-1 array")
    arrays = []
    for k, lv in enumerate(levels):
        arr = np.array(lv, dtype=float)
        if k == 1:
            dim = arr.shape[0]
        arr.setflags(write=False)
        arrays.append(arr)
    return TensorGroupElement(dim=dim, level=len(arrays) - 1, levels=tuple(arrays))


def identity(dim: int, level: int) -> TensorGroupElement:
    _check_size(dim, level)
    levels = [np.array(1.0)] + [np.zeros((dim,) * k) for k in range(1, level + 1)]
    for arr in levels:
        arr.setflags(write=False)
    return TensorGroupElement(dim=dim, level=level, levels=tuple(levels))


def _same_shape(g: TensorGroupElement, h: TensorGroupElement) -> None:
    if g.dim != h.dim or g.level != h.level:
        raise ValueError(
            f"mismatched elements: dim/level ({g.dim},{g.level}) vs ({h.dim},{h.level})"
        )


# -- raw level-list algebra (level-0 scalar may be arbitrary) ----------------


def _mul_levels(a: list[np.ndarray], b: list[np.ndarray]) -> list[np.ndarray]:
    n = len(a) - 1
    out = []
    for k in range(n + 1):
        acc = np.multiply.outer(a[0], b[k])
        for i in range(1, k + 1):
            acc = acc + np.multiply.outer(a[i], b[k - i])
        out.append(acc)
    return out


def _one_levels(dim: int, level: int) -> list[np.ndarray]:
    return [np.array(1.0)] + [np.zeros((dim,) * k) for k in range(1, level + 1)]


def _neumann_series(x: list[np.ndarray], coeff) -> list[np.ndarray]:
    """sum_k coeff(k) * x**k for a level list x with zero scalar part."""
    level = len(x) - 1
    dim = x[1].shape[0] if level >= 1 else 1
    out = _one_levels(dim, level)
    out[0] = np.array(float(coeff(0)))
    power = x
    for k in range(1, level + 1):
        c = float(coeff(k))
        out = [o + c * p for o, p in zip(out, power)]
        if k < level:
            power = _mul_levels(power, x)
    return out


def _freeze(levels: list[np.ndarray]) -> tuple[np.ndarray, ...]:
    for arr in levels:
        arr.setflags(write=False)
    return tuple(levels)


def multiply(g: TensorGroupElement, h: TensorGroupElement) -> TensorGroupElement:
    """Truncated tensor product of two elements."""
    _same_shape(g, h)
    out = _mul_levels(list(g.levels), list(h.levels))
    return TensorGroupElement(g.dim, g.level, _freeze(out))


def inverse(g: TensorGroupElement) -> TensorGroupElement:
    """Group inverse via the truncated Neumann series of (1 + (g - 1))^-1."""
    x = [np.array(0.0)] + [np.array(lv) for lv in g.levels[1:]]
    out = _neumann_series(x, lambda k: (-1.0) ** k)
    return TensorGroupElement(g.dim, g.level, _freeze(out))


def dilate(g: TensorGroupElement, lam: float) -> TensorGroupElement:
    """Dilation: level k is scaled by lam**k."""
    out = [np.array(1.0)] + [np.array(lv) * lam**k for k, lv in enumerate(g.levels) if k >= 1]
    return TensorGroupElement(g.dim, g.level, _freeze(out))


def homogeneous_norm(g: TensorGroupElement) -> float:
    """sum_k |g^k|**(1/k) with |.| the Euclidean norm per level."""
    total = 0.0
    for k in range(1, g.level + 1):
        nk = float(np.linalg.norm(g.levels[k].ravel()))
        total += nk ** (1.0 / k)
    return total


def cc_distance(g: TensorGroupElement, h: TensorGroupElement) -> float:
    """Left-invariant homogeneous distance |g^-1 (x) h|.

    The homogeneous surrogate norm is not symmetric in g <-> g^-1, so this
    one-sided value can differ from cc_distance(h, g) by a bounded factor;
    the pairwise matrices used by the variation functionals symmetrize by
    taking the larger of the two orientations (see
    :func:`cc_distance_matrix`).
    """
    _same_shape(g, h)
    return homogeneous_norm(multiply(inverse(g), h))


def exp_tensor(v: np.ndarray, level: int) -> TensorGroupElement:
    """Exponential of a level-1 vector: levels v**(tensor k) / k!."""
    v = np.asarray(v, dtype=float)
    out = [np.array(1.0)]
    cur = np.array(1.0)
    fact = 1.0
    for k in range(1, level + 1):
        cur = np.multiply.outer(cur, v)
        fact *= k
        out.append(cur / fact)
    return TensorGroupElement(v.shape[0], level, _freeze(out))


def log_tensor(g: TensorGroupElement) -> list[np.ndarray]:
    """Tensor logarithm as a level list with zero scalar part."""
    x = [np.array(0.0)] + [np.array(lv) for lv in g.levels[1:]]
    out = _neumann_series(x, lambda k: 0.0 if k == 0 else (-1.0) ** (k + 1) / k)
    out[0] = np.array(0.0)
    return out


def _exp_levels_raw(x: list[np.ndarray]) -> list[np.ndarray]:
    """Tensor exponential of a level list with zero scalar part."""
    import math

    return _neumann_series(x, lambda k: 1.0 / math.factorial(k))


# -- group paths --------------------------------------------------------------


@dataclass(frozen=True)
class GroupPath:
    """A time grid with group points, stored as stacked per-level arrays.

    ``levels[k]`` has shape ``(n,) + (dim,) * k``; ``levels[0]`` is all ones.
    Times are normalized to [0, 1].
    """

    times: np.ndarray
    levels: tuple[np.ndarray, ...]

    @property
    def n_points(self) -> int:
        return self.times.shape[0]

    @property
    def dim(self) -> int:
        return self.levels[1].shape[1]

    @property
    def level(self) -> int:
        return len(self.levels) - 1

    def point(self, i: int) -> TensorGroupElement:
        levels = [np.array(1.0)] + [np.array(self.levels[k][i]) for k in range(1, self.level + 1)]
        return TensorGroupElement(self.dim, self.level, _freeze(levels))

    def index_at(self, t: float) -> int:
        idx = int(np.searchsorted(self.times, t))
        for j in (idx - 1, idx, idx + 1):
            if 0 <= j < self.n_points and abs(self.times[j] - t) <= 1e-12:
                return j
        raise ValueError(f"time {t} is not on the sample grid")

    def increment(self, s: float, t: float) -> TensorGroupElement:
        i, j = self.index_at(s), self.index_at(t)
        return multiply(inverse(self.point(i)), self.point(j))


def _normalize_times(times: np.ndarray, n: int) -> np.ndarray:
    if times is None:
        return np.linspace(0.0, 1.0, n)
    times = np.asarray(times, dtype=float)
    if times.shape != (n,):
        raise ValueError("times and points must have matching lengths")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    span = times[-1] - times[0]
    return (times - times[0]) / span


def _batch_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(n, p), (n, q) -> (n, p*q) row-wise outer products."""
    return np.einsum("np,nq->npq", a, b).reshape(a.shape[0], -1)


def lift_piecewise_linear(points, times=None, level: int = 2) -> GroupPath:
    """Step-N signature of the piecewise-linear path through the points.

    The point at t_j is the Chen product of the segment exponentials
    exp(dx_i) for i < j; the per-segment exponential is exact, so the lift
    carries no truncation error beyond the level cutoff.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, d = pts.shape
    if n < 2:
        raise ValueError("need at least two path points")
    _check_size(d, level)
    t = _normalize_times(times, n)
    dx = np.diff(pts, axis=0)

    # dx tensor powers over segments, flattened, with 1/b! absorbed
    powers = [np.ones((n - 1, 1)), dx]
    for b in range(2, level + 1):
        powers.append(_batch_outer(powers[b - 1], dx) / b)

    # level L at t_{k+1} accumulates sum_b g^{L-b}(t_k) (x) dx_k**b / b!
    flats = [np.ones((n, 1))]
    levels: list[np.ndarray] = [np.ones(n)]
    for L in range(1, level + 1):
        inc = _batch_outer(flats[L - 1][:-1], powers[1])
        for b in range(2, L + 1):
            inc = inc + _batch_outer(flats[L - b][:-1], powers[b])
        flat = np.vstack([np.zeros((1, d**L)), np.cumsum(inc, axis=0)])
        flats.append(flat)
        arr = flat.reshape((n,) + (d,) * L)
        arr.setflags(write=False)
        levels.append(arr)
    return GroupPath(times=t, levels=tuple(levels))


def levy_area_increment(gp: GroupPath, s: float, t: float) -> np.ndarray:
    """Antisymmetric part of the level-2 increment over grid times [s, t]."""
    if gp.level < 2:
        raise ValueError("Levy area needs a lift of level >= 2")
    if not s < t:
        raise ValueError("need s < t")
    m = gp.increment(s, t).levels[2]
    return 0.5 * (m - m.T)


def group_path_interpolate(gp: GroupPath, new_times) -> GroupPath:
    """Evaluate the path at new times by per-segment geodesic interpolation.

    Between grid points the increment logarithm is scaled linearly; for
    piecewise-linear lifts this reproduces the underlying path's lift
    exactly.  New times must lie within [0, 1].
    """
    new_times = np.asarray(new_times, dtype=float)
    if np.any(np.diff(new_times) <= 0):
        raise ValueError("times must be strictly increasing")
    if new_times[0] < gp.times[0] - 1e-12 or new_times[-1] > gp.times[-1] + 1e-12:
        raise ValueError("interpolation times outside the path's time range")
    n, d, N = new_times.shape[0], gp.dim, gp.level
    flats = [np.ones((n, 1))] + [np.empty((n, d**k)) for k in range(1, N + 1)]
    seg_logs: dict[int, list[np.ndarray]] = {}
    for out_i, t in enumerate(new_times):
        j = int(np.searchsorted(gp.times, t, side="right")) - 1
        j = min(max(j, 0), gp.n_points - 2)
        if abs(gp.times[j] - t) <= 1e-12:
            pt = gp.point(j)
        elif abs(gp.times[j + 1] - t) <= 1e-12:
            pt = gp.point(j + 1)
        else:
            theta = (t - gp.times[j]) / (gp.times[j + 1] - gp.times[j])
            if j not in seg_logs:
                seg_logs[j] = log_tensor(
                    multiply(inverse(gp.point(j)), gp.point(j + 1))
                )
            scaled = [lv * theta for lv in seg_logs[j]]
            scaled[0] = np.array(0.0)
            step = _exp_levels_raw(scaled)
            pt_levels = _mul_levels(list(gp.point(j).levels), step)
            pt = TensorGroupElement(d, N, _freeze(pt_levels))
        for k in range(1, N + 1):
            flats[k][out_i] = pt.levels[k].ravel()
    levels = [np.ones(n)] + [flats[k].reshape((n,) + (d,) * k) for k in range(1, N + 1)]
    for arr in levels:
        arr.setflags(write=False)
    return GroupPath(times=new_times, levels=tuple(levels))


# -- vectorized pairwise machinery (used by the variation functionals) -------


def _batch_mul_flat(a: list[np.ndarray], b: list[np.ndarray], d: int) -> list[np.ndarray]:
    out = []
    for k in range(len(a)):
        acc = a[0] * b[k] if a[0].shape[1] == 1 else _batch_outer(a[0], b[k])
        for i in range(1, k + 1):
            acc = acc + _batch_outer(a[i], b[k - i])
        out.append(acc)
    return out


def _flat_levels(gp: GroupPath) -> list[np.ndarray]:
    n = gp.n_points
    return [gp.levels[0].reshape(n, 1)] + [
        gp.levels[k].reshape(n, -1) for k in range(1, gp.level + 1)
    ]


def _flat_inverse(flats: list[np.ndarray], d: int) -> list[np.ndarray]:
    n = flats[0].shape[0]
    x = [np.zeros((n, 1))] + [f.copy() for f in flats[1:]]
    out = [np.ones((n, 1))] + [np.zeros_like(f) for f in flats[1:]]
    power = x
    sign = 1.0
    for k in range(1, len(flats)):
        sign = -sign
        out = [o + sign * p for o, p in zip(out, power)]
        if k < len(flats) - 1:
            power = _batch_mul_flat(power, x, d)
    return out


def _pairwise_increment_flat(gp: GroupPath) -> list[np.ndarray]:
    """Level arrays of g_i^-1 (x) g_j for all ordered pairs, shape (n, n, d**k)."""
    n, d, N = gp.n_points, gp.dim, gp.level
    g = _flat_levels(gp)
    inv = _flat_inverse(g, d)
    out = []
    for L in range(1, N + 1):
        acc = np.zeros((n, n, d**L))
        for a in range(0, L + 1):
            b = L - a
            term = np.einsum("ip,jq->ijpq", inv[a], g[b]).reshape(n, n, -1)
            acc += term
        out.append(acc)
    return out


def _level2_square_norms(gp: GroupPath) -> np.ndarray:
    """|level-2 of g_i^-1 g_j|^2 for all ordered pairs, entry by entry."""
    n, d = gp.n_points, gp.dim
    x = gp.levels[1]
    g2 = gp.levels[2]
    sq = np.zeros((n, n))
    for p in range(d):
        for q in range(d):
            # M_ij[p,q] = g2_j[p,q] - (g2_i[p,q] - x_ip x_iq) - x_ip x_jq
            base = g2[:, p, q] - x[:, p] * x[:, q]
            entry = g2[None, :, p, q] - base[:, None] - np.outer(x[:, p], x[:, q])
            sq += entry**2
    return sq


def cc_distance_matrix(gp: GroupPath) -> np.ndarray:
    """Symmetrized homogeneous distance over all grid pairs, shape (n, n)."""
    if gp.level == 2:
        from scipy.spatial.distance import cdist

        norm = cdist(gp.levels[1], gp.levels[1]) + _level2_square_norms(gp) ** 0.25
    else:
        incs = _pairwise_increment_flat(gp)
        norm = np.zeros((gp.n_points, gp.n_points))
        for L, arr in enumerate(incs, start=1):
            norm += np.linalg.norm(arr, axis=2) ** (1.0 / L)
    dist = np.maximum(norm, norm.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def cc_distance_matrices_by_level(gp: GroupPath, levels: tuple[int, ...]) -> dict[int, np.ndarray]:
    """Distance matrices of the truncations of gp to each requested level.

    The pairwise increments are computed once at the full level; truncating
    the homogeneous norm to its first k terms gives the step-k distance, so
    all requested levels share one sweep.
    """
    if max(levels) > gp.level:
        raise ValueError("requested level exceeds the path's level")
    incs = _pairwise_increment_flat(gp)
    acc = np.zeros((gp.n_points, gp.n_points))
    out: dict[int, np.ndarray] = {}
    for L, arr in enumerate(incs, start=1):
        acc = acc + np.linalg.norm(arr, axis=2) ** (1.0 / L)
        if L in levels:
            dist = np.maximum(acc, acc.T)
            np.fill_diagonal(dist, 0.0)
            out[L] = dist
    return out


def area_distance_matrix(gp: GroupPath) -> np.ndarray:
    """Frobenius norm of the Levy-area increment over all grid pairs.

    Uses the additivity defect identity: the area increment over [s, t]
    equals the running-area difference minus the antisymmetrized chord
    cross term, so only the d(d-1)/2 independent entries are formed.
    """
    if gp.level < 2:
        raise ValueError("area distances need a lift of level >= 2")
    n, d = gp.n_points, gp.dim
    x = gp.levels[1]
    g2 = gp.levels[2]
    sq = np.zeros((n, n))
    for p in range(d):
        for q in range(p + 1, d):
            a = 0.5 * (g2[:, p, q] - g2[:, q, p])
            entry = a[None, :] - a[:, None] - 0.5 * (
                np.outer(x[:, p], x[:, q]) - np.outer(x[:, q], x[:, p])
            )
            sq += entry**2
    dist = np.sqrt(2.0 * sq)
    np.fill_diagonal(dist, 0.0)
    return dist


# -- path import/export -------------------------------------------------------


def read_path_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a path from CSV with header ``t,x1,...,xd``."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[0] != "t" or any(h != f"x{i}" for i, h in enumerate(header[1:], start=1)):
            raise ValueError(f"unexpected CSV header {header!r}, want t,x1,...,xd")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return data[:, 0], data[:, 1:]


def write_path_csv(path, times: np.ndarray, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    header = "t," + ",".join(f"x{i}" for i in range(1, values.shape[1] + 1))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for t, row in zip(times, values):
            fh.write(",".join(repr(float(v)) for v in (t, *row)) + "\n")


def group_path_to_json(gp: GroupPath) -> str:
    """Serialize per-level coefficients as flat row-major arrays."""
    payload = {
        "dim": gp.dim,
        "level": gp.level,
        "times": [float(t) for t in gp.times],
        "levels": {
            str(k): [[float(v) for v in row.ravel()] for row in gp.levels[k]]
            for k in range(1, gp.level + 1)
        },
    }
    return json.dumps(payload)


def group_path_from_json(text: str) -> GroupPath:
    data = json.loads(text)
    d, N = int(data["dim"]), int(data["level"])
    times = np.asarray(data["times"], dtype=float)
    n = times.shape[0]
    levels = [np.ones(n)]
    for k in range(1, N + 1):
        arr = np.asarray(data["levels"][str(k)], dtype=float).reshape((n,) + (d,) * k)
        arr.setflags(write=False)
        levels.append(arr)
    return GroupPath(times=times, levels=tuple(levels))
