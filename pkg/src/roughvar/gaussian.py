"""Gaussian samplers on [0, 1] and enhancement of samples to rough paths.

Fractional Brownian motion is sampled from its exact joint law by a dense
Cholesky factorization of the increment covariance (cached per (H, n));
desk-scale grids make the cubic cost acceptable and exactness keeps the
sampling error out of the theorem checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .nilpotent import GroupPath, lift_piecewise_linear
from .variation import SampledPath

__all__ = [
    "RngSeed",
    "generator",
    "CovarianceModel",
    "brownian_model",
    "fbm_model",
    "model_from_name",
    "validate_covariance",
    "sample_bm",
    "sample_fbm",
    "enhance_to_rough_path",
]

FBM_MAX_GRID = 4096

_BRIDGE_TAG = 911


@dataclass(frozen=True)
class RngSeed:
    """Master seed plus replication index; substreams are pure functions of both."""

    master: int
    index: int = 0


def generator(seed: RngSeed | int, tag: int | None = None) -> np.random.Generator:
    if isinstance(seed, int):
        seed = RngSeed(seed)
    key = (seed.index,) if tag is None else (seed.index, tag)
    return np.random.default_rng(np.random.SeedSequence(entropy=seed.master, spawn_key=key))


@dataclass(frozen=True)
class CovarianceModel:
    """Covariance R(s, t) with its declared 2D rho-variation exponent."""

    name: str
    R: Callable[[np.ndarray, np.ndarray], np.ndarray]
    rho: float


def brownian_model() -> CovarianceModel:
    return CovarianceModel(name="bm", R=lambda s, t: np.minimum(s, t), rho=1.0)


def fbm_model(hurst: float) -> CovarianceModel:
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"Hurst parameter must lie in (0, 1), got {hurst}")
    h2 = 2.0 * hurst

    def R(s, t):
        return 0.5 * (np.abs(s) ** h2 + np.abs(t) ** h2 - np.abs(t - s) ** h2)

    return CovarianceModel(name=f"fbm:{hurst:g}", R=R, rho=1.0 / h2)


def model_from_name(name: str) -> CovarianceModel:
    if name == "bm":
        return brownian_model()
    if name.startswith("fbm:"):
        return fbm_model(float(name.split(":", 1)[1]))
    raise ValueError(f"unknown covariance model {name!r} (want 'bm' or 'fbm:H')")


def validate_covariance(model: CovarianceModel, grid, tol: float = 1e-10) -> None:
    """Check symmetry, nonnegative diagonal and PSD increment covariance."""
    grid = np.asarray(grid, dtype=float)
    uu, vv = np.meshgrid(grid, grid, indexing="ij")
    P = np.asarray(model.R(uu, vv), dtype=float)
    if not np.allclose(P, P.T, atol=1e-12):
        raise ValueError(f"covariance {model.name} is not symmetric on the probe grid")
    if np.any(np.diagonal(P) < -1e-12):
        raise ValueError(f"covariance {model.name} has negative variance on the grid")
    C = P[1:, 1:] - P[1:, :-1] - P[:-1, 1:] + P[:-1, :-1]
    if float(np.linalg.eigvalsh(C).min()) < -tol:
        raise ValueError(f"increment covariance of {model.name} is not PSD within {tol}")


def sample_bm(n: int, d: int, seed: RngSeed) -> SampledPath:
    """Standard d-dimensional Brownian motion on the uniform n-point grid."""
    if n < 2:
        raise ValueError("need at least two grid points")
    rng = generator(seed)
    dt = 1.0 / (n - 1)
    inc = rng.standard_normal((n - 1, d)) * math.sqrt(dt)
    values = np.vstack([np.zeros((1, d)), np.cumsum(inc, axis=0)])
    return SampledPath.euclidean(np.linspace(0.0, 1.0, n), values, name="bm")


_fbm_factor_cache: dict[tuple[float, int], np.ndarray] = {}


def _fbm_increment_factor(hurst: float, n: int) -> np.ndarray:
    key = (hurst, n)
    if key in _fbm_factor_cache:
        return _fbm_factor_cache[key]
    times = np.linspace(0.0, 1.0, n)
    model = fbm_model(hurst)
    uu, vv = np.meshgrid(times, times, indexing="ij")
    P = model.R(uu, vv)
    C = P[1:, 1:] - P[1:, :-1] - P[:-1, 1:] + P[:-1, :-1]
    try:
        L = np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        warnings.warn(
            f"fBM increment covariance (H={hurst}, n={n}) required a 1e-12 diagonal jitter"
        )
        L = np.linalg.cholesky(C + 1e-12 * np.eye(n - 1))
    _fbm_factor_cache[key] = L
    return L


def sample_fbm(hurst: float, n: int, d: int, seed: RngSeed) -> SampledPath:
    """Fractional Brownian motion from the exact joint Gaussian law.

    Components are independent; the one-time O(n^3) factorization of the
    increment covariance is cached and shared across replications.
    """
    if n < 2:
        raise ValueError("need at least two grid points")
    if n > FBM_MAX_GRID:
        raise ValueError(f"fBM sampling limited to n <= {FBM_MAX_GRID} (factorization cost)")
    L = _fbm_increment_factor(hurst, n)
    rng = generator(seed)
    inc = L @ rng.standard_normal((n - 1, d))
    values = np.vstack([np.zeros((1, d)), np.cumsum(inc, axis=0)])
    return SampledPath.euclidean(np.linspace(0.0, 1.0, n), values, name=f"fbm:{hurst:g}")


def _bridge_refine(times: np.ndarray, values: np.ndarray, rounds: int, seed: RngSeed):
    """Brownian-bridge midpoint refinement, exact in law, one round at a time.

    Round r draws from its own substream, so a deeper refinement of the same
    seed extends a shallower one (the first rounds coincide).
    """
    for r in range(rounds):
        rng = generator(seed, tag=_BRIDGE_TAG + r)
        gaps = np.diff(times)
        mids = 0.5 * (values[:-1] + values[1:])
        noise = rng.standard_normal(mids.shape) * np.sqrt(gaps / 4.0)[:, None]
        new_times = np.empty(2 * times.shape[0] - 1)
        new_times[0::2] = times
        new_times[1::2] = times[:-1] + gaps / 2.0
        new_values = np.empty((new_times.shape[0], values.shape[1]))
        new_values[0::2] = values
        new_values[1::2] = mids + noise
        times, values = new_times, new_values
    return times, values


def enhance_to_rough_path(
    path: SampledPath, level: int = 2, substeps: int = 1, seed: RngSeed | None = None
) -> GroupPath:
    """Lift a sampled path to the step-N group.

    With ``substeps == 1`` this is the piecewise-linear lift of the samples.
    With ``substeps == 2**r`` (Brownian paths only) the path is first refined
    by r rounds of conditional midpoint sampling and the finer lift is read
    off at the coarse times, approximating the Stratonovich enhancement.
    """
    if path.metric != "euclidean":
        raise ValueError("enhancement starts from a vector-valued path")
    if level < 1:
        raise ValueError("level must be >= 1")
    if substeps == 1:
        return lift_piecewise_linear(path.values, path.times, level=level)
    if path.name != "bm":
        raise ValueError(
            f"bridge refinement is only available for Brownian samples, not {path.name!r}"
        )
    rounds = int(round(math.log2(substeps)))
    if 2**rounds != substeps or rounds < 1:
        raise ValueError(f"substeps must be a power of two, got {substeps}")
    if seed is None:
        raise ValueError("bridge refinement needs an RngSeed")
    times, values = _bridge_refine(path.times, path.values, rounds, seed)
    fine = lift_piecewise_linear(values, times, level=level)
    keep = slice(None, None, substeps)
    levels = tuple(arr[keep] for arr in fine.levels)
    return GroupPath(times=fine.times[keep], levels=levels)
