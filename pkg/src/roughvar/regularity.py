"""Monotone regularity functions used by variation and Hoelder functionals.

The built-in families are the power functions ``x**p``, the single-log pair
(``phi1``, ``psi1``) and the iterated-log pair (``phi2``, ``psi2``):

    phi_{p,1}(x) = x**(1/p) * sqrt(log1(x)),   psi_{p,1}(x) = (x / sqrt(log1(x)))**p
    phi_{p,2}(x) = x**(1/p) * sqrt(log2(x)),   psi_{p,2}(x) = (x / sqrt(log2(x)))**p

where ``log1(x) = log(1/x)`` for ``x <= 1/e`` and ``1`` otherwise, and
``log2(x) = log log(1/x)`` for ``x <= exp(-e)`` and ``1`` otherwise.  All
families vanish at zero and are continuous; strict monotonicity holds on a
per-family domain ``(0, monotone_limit]`` that is probed numerically at
construction time (the psi and power families are globally increasing, the
phi families can dip near the logarithm breakpoints for large ``p``).
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "RegularityFunction",
    "DoublingReport",
    "log1",
    "log2",
    "psi",
    "phi",
    "power",
    "custom",
    "compose_with_sqrt",
    "evaluate",
    "inverse",
    "check_doubling",
    "default_probe_grid",
    "to_json",
    "from_json",
]

E_INV = math.exp(-1.0)
EE_INV = math.exp(-math.e)

# psi values below this input are clamped to zero (their limit); avoids
# spurious overflow in log log at denormal arguments.
PSI_UNDERFLOW = 1e-300


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def log1(x):
    """Piecewise log(1/x), clamped to 1 for x > 1/e; +inf at x = 0."""
    arr, scalar = _as_array(x)
    out = np.ones_like(arr)
    inside = (arr > 0) & (arr <= E_INV)
    out[inside] = np.log(1.0 / arr[inside])
    out[arr == 0] = np.inf
    return float(out) if scalar else out


def log2(x):
    """Piecewise log log(1/x), clamped to 1 for x > exp(-e); +inf at x = 0."""
    arr, scalar = _as_array(x)
    out = np.ones_like(arr)
    inside = (arr > 0) & (arr <= EE_INV)
    out[inside] = np.log(np.log(1.0 / arr[inside]))
    out[arr == 0] = np.inf
    return float(out) if scalar else out


@dataclass(frozen=True)
class RegularityFunction:
    """A strictly increasing function f with f(0) = 0 and optional inverse.

    ``monotone_limit`` is the upper end of the domain on which strict
    monotonicity has been verified (``inf`` when the function is globally
    increasing).  ``closed_inverse`` is used when available; otherwise
    :func:`inverse` falls back to monotone bisection.
    """

    family: str
    p: float
    fn: Callable[[np.ndarray], np.ndarray]
    closed_inverse: Callable[[np.ndarray], np.ndarray] | None = None
    monotone_limit: float = math.inf

    def __call__(self, x):
        return evaluate(self, x)

    def inverse(self, y):
        return inverse(self, y)


def evaluate(f: RegularityFunction, x):
    """Evaluate f at nonnegative x (scalar or array)."""
    arr, scalar = _as_array(x)
    if np.any(arr < 0):
        raise ValueError("regularity functions are defined for x >= 0 only")
    out = f.fn(arr)
    return float(out) if scalar else out


def _find_monotone_limit(fn: Callable) -> float:
    grid = np.geomspace(1e-12, 8.0, 1600)
    vals = fn(grid)
    drops = np.nonzero(np.diff(vals) <= 0)[0]
    if drops.size == 0:
        return math.inf
    return float(grid[drops[0]])


def _psi_eval(arr: np.ndarray, p: float, flavor: int) -> np.ndarray:
    logf = log1 if flavor == 1 else log2
    out = np.zeros_like(arr)
    live = arr >= PSI_UNDERFLOW
    xl = arr[live]
    out[live] = (xl / np.sqrt(logf(xl))) ** p
    return out


def _phi_eval(arr: np.ndarray, p: float, flavor: int) -> np.ndarray:
    logf = log1 if flavor == 1 else log2
    out = np.zeros_like(arr)
    live = arr > 0
    xl = arr[live]
    # x**(1/p) dominates the sqrt(log) factor, so the product tends to 0.
    out[live] = xl ** (1.0 / p) * np.sqrt(logf(xl))
    return out


@functools.lru_cache(maxsize=None)
def psi(p: float, flavor: int = 2) -> RegularityFunction:
    """psi_{p,flavor}: the Taylor-type variation function family."""
    if p < 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    if flavor not in (1, 2):
        raise ValueError("flavor must be 1 or 2")
    fn = lambda arr: _psi_eval(arr, p, flavor)
    # Both psi families are strictly increasing on all of [0, inf): the
    # log-corrected piece has positive derivative and joins x**p continuously.
    return RegularityFunction(family=f"psi{flavor}", p=float(p), fn=fn)


@functools.lru_cache(maxsize=None)
def phi(p: float, flavor: int = 2) -> RegularityFunction:
    """phi_{p,flavor}: the Levy-modulus / LIL scaling function family."""
    if p < 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    if flavor not in (1, 2):
        raise ValueError("flavor must be 1 or 2")
    fn = lambda arr: _phi_eval(arr, p, flavor)
    limit = _find_monotone_limit(fn)
    return RegularityFunction(family=f"phi{flavor}", p=float(p), fn=fn, monotone_limit=limit)


@functools.lru_cache(maxsize=None)
def power(p: float) -> RegularityFunction:
    """The plain power function x**p (p-variation when fed to V)."""
    if p < 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    return RegularityFunction(
        family="power",
        p=float(p),
        fn=lambda arr: arr**p,
        closed_inverse=lambda y: y ** (1.0 / p),
    )


def custom(
    fn: Callable,
    closed_inverse: Callable | None = None,
    p: float = 1.0,
    monotone_limit: float | None = None,
) -> RegularityFunction:
    """Wrap an arbitrary vectorized increasing function with f(0) = 0."""
    limit = _find_monotone_limit(fn) if monotone_limit is None else monotone_limit
    return RegularityFunction(
        family="custom", p=float(p), fn=fn, closed_inverse=closed_inverse, monotone_limit=limit
    )


def compose_with_sqrt(f: RegularityFunction) -> RegularityFunction:
    """Return x -> f(sqrt(x)), the area-functional composition.

    Feeding absolute area increments to the composed function realises the
    ``V_{psi o sqrt}`` functional; the matching norm scales areas by
    ``1/eps**2`` (see :func:`roughvar.variation.psi_variation_norm`).
    """
    inv = None
    if f.closed_inverse is not None:
        inv = lambda y: f.closed_inverse(y) ** 2
    limit = f.monotone_limit**2 if math.isfinite(f.monotone_limit) else math.inf
    return RegularityFunction(
        family="custom",
        p=f.p,
        fn=lambda arr: f.fn(np.sqrt(arr)),
        closed_inverse=inv,
        monotone_limit=limit,
    )


def _bisect_monotone(fn: Callable, y: np.ndarray, hi_limit: float) -> np.ndarray:
    """Solve fn(x) = y for increasing fn on [0, hi_limit] by bisection."""
    hi = np.full_like(y, min(1.0, hi_limit))
    for _ in range(2100):
        low = fn(hi) < y
        if not low.any():
            break
        grown = np.minimum(hi * 2.0, hi_limit)
        stuck = low & (grown == hi)
        if stuck.any():
            raise ValueError("value outside the range of the regularity function")
        hi = np.where(low, grown, hi)
    else:
        raise ValueError("value outside the range of the regularity function")
    lo = np.zeros_like(y)
    for _ in range(200):
        width = hi - lo
        if np.all(width <= 1e-12 * np.maximum(hi, 1e-300)):
            break
        mid = 0.5 * (lo + hi)
        below = fn(mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return hi


def inverse(f: RegularityFunction, y):
    """Inverse of f at nonnegative y; bisection when no closed form exists."""
    arr, scalar = _as_array(y)
    if np.any(arr < 0):
        raise ValueError("inverse is defined for y >= 0 only")
    if f.closed_inverse is not None:
        out = np.where(arr == 0, 0.0, f.closed_inverse(arr))
    else:
        out = np.zeros_like(arr)
        pos = arr > 0
        if pos.any():
            out[pos] = _bisect_monotone(f.fn, arr[pos], f.monotone_limit)
    return float(out) if scalar else out


def default_probe_grid() -> np.ndarray:
    """Geometric grid accumulating at 0: 10**(-k/4) for k = 8..60."""
    return 10.0 ** (-np.arange(8, 61) / 4.0)


@dataclass(frozen=True)
class DoublingReport:
    kind: str
    constant: float
    satisfied: bool
    grid: np.ndarray
    ratios: np.ndarray


def check_doubling(
    f: RegularityFunction, kind: str, probe_grid: np.ndarray | None = None
) -> DoublingReport:
    """Probe the local doubling properties of f near zero.

    ``kind='d2'`` probes sup of f^{-1}(2 f(s)) / s, ``kind='delta2'`` probes
    sup of f(2s) / f(s).  The ``satisfied`` flag is true when every ratio is
    finite and the ratios show no upward trend across the two finest decades
    of the probe grid.
    """
    if kind not in ("d2", "delta2"):
        raise ValueError("kind must be 'd2' or 'delta2'")
    grid = default_probe_grid() if probe_grid is None else np.asarray(probe_grid, dtype=float)
    grid = np.sort(grid)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if kind == "d2":
            ratios = inverse(f, 2.0 * evaluate(f, grid)) / grid
        else:
            fg = evaluate(f, grid)
            ratios = np.where(fg > 0, evaluate(f, 2.0 * grid) / np.where(fg > 0, fg, 1.0), np.inf)
    constant = float(np.max(ratios))
    finite = bool(np.all(np.isfinite(ratios)))
    decade = np.floor(np.log10(grid))
    finest = ratios[decade == decade.min()]
    second = ratios[decade == decade.min() + 1]
    no_trend = finite and second.size > 0 and float(np.mean(finest)) <= 1.1 * float(np.mean(second))
    return DoublingReport(kind=kind, constant=constant, satisfied=no_trend, grid=grid, ratios=ratios)


def to_json(f: RegularityFunction) -> str:
    """Serialize a built-in family descriptor to JSON."""
    if f.family == "custom":
        raise ValueError("custom regularity functions are not serializable")
    return json.dumps({"family": f.family, "p": f.p})


def from_json(text: str) -> RegularityFunction:
    data = json.loads(text)
    family, p = data["family"], float(data["p"])
    if family == "power":
        return power(p)
    if family in ("psi1", "psi2"):
        return psi(p, flavor=int(family[-1]))
    if family in ("phi1", "phi2"):
        return phi(p, flavor=int(family[-1]))
    raise ValueError(f"unknown regularity family {family!r}")
