"""Experiment driver: Monte Carlo verdicts for the regularity and tail claims.

Each experiment draws a deterministic set of replications (per-replication
seeds are pure functions of the config seed), emits raw per-replication
rows, per-grid summary statistics, tail fits where applicable, and named
verdicts.  Verdicts are recomputable from the raw rows alone.

Divergence-style claims (suprema that grow without bound) are
operationalized as a monotone trend: the median functional must increase
strictly across at least four consecutive grid doublings with total growth
factor at least two.  Law-of-iterated-logarithm claims evaluate ratios on a
dyadic ladder h = 2^-k, k = 4..12, and report the ladder maximum, an
underestimate of the limit superior.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import regularity
from .gaussian import RngSeed, enhance_to_rough_path, generator, model_from_name, sample_bm, sample_fbm
from .nilpotent import levy_area_increment, lift_piecewise_linear
from .regularity import compose_with_sqrt, power, psi
from .tails import borell_halfspace_check, fit_tail
from .translation import translation_bound_ratio
from .variation import SampledPath, psi_variation, psi_variation_norm

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "Verdict",
    "EXPERIMENTS",
    "run_experiment",
    "write_report",
    "config_from_dict",
]

EXPERIMENTS = ("taylor", "levy_area", "gauss_tail", "lil", "lift", "translate", "borell")

# experiments whose verdicts rest on fitted tails; these need real sample sizes
TAIL_EXPERIMENTS = ("levy_area", "gauss_tail", "borell")

_DEFAULT_GRIDS = {
    "taylor": (256, 512, 1024, 2048, 4096, 8192),
    "levy_area": (1024,),
    "gauss_tail": (1024,),
    "lil": (8192,),
    "lift": (256, 512, 1024),
    "translate": (256, 512),
    "borell": (),
}

_DEFAULT_REPLICATIONS = {
    "taylor": 100,
    "levy_area": 2000,
    "gauss_tail": 2000,
    "lil": 500,
    "lift": 100,
    "translate": 100,
    "borell": 100_000,
}

_GRID_MIN, _GRID_MAX = 2**6, 2**14


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of one experiment run; JSON-serializable field for field."""

    experiment: str
    model: str = "bm"
    grid_sizes: tuple[int, ...] = ()
    replications: int = 0
    psi_family: str = "psi2"
    psi_p: float = 0.0  # 0 means: pick the model's natural exponent
    seed: int = 0
    out_dir: str | None = None
    overwrite: bool = False


def config_from_dict(data: dict) -> ExperimentConfig:
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown config fields: {sorted(extra)}")
    if "grid_sizes" in data:
        data = dict(data, grid_sizes=tuple(int(n) for n in data["grid_sizes"]))
    return ExperimentConfig(**data)


def _resolve(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}, want one of {EXPERIMENTS}")
    model = model_from_name(cfg.model)  # raises on bad model strings
    grids = cfg.grid_sizes or _DEFAULT_GRIDS[cfg.experiment]
    if cfg.experiment == "gauss_tail" and not cfg.grid_sizes and cfg.model != "bm":
        grids = (512,)
    reps = cfg.replications or _DEFAULT_REPLICATIONS[cfg.experiment]
    p = cfg.psi_p
    if p == 0.0:
        p = 2.0 if model.rho == 1.0 else 2.0 * model.rho
    for n in grids:
        if n & (n - 1) or not (_GRID_MIN <= n <= _GRID_MAX):
            raise ValueError(f"grid sizes must be powers of two in [{_GRID_MIN}, {_GRID_MAX}], got {n}")
        if cfg.model.startswith("fbm") and n > 4096:
            raise ValueError(f"fbm sampling supports n <= 4096, got {n}")
    if cfg.experiment in TAIL_EXPERIMENTS and reps < 100:
        raise ValueError(f"tail experiments need at least 100 replications, got {reps}")
    if reps < 1:
        raise ValueError("need at least one replication")
    if cfg.psi_family not in ("psi1", "psi2", "power"):
        raise ValueError(f"unsupported psi family {cfg.psi_family!r}")
    if cfg.model != "bm" and cfg.experiment not in ("taylor", "gauss_tail"):
        raise ValueError(f"experiment {cfg.experiment!r} is defined for the bm model only")
    return ExperimentConfig(
        experiment=cfg.experiment,
        model=cfg.model,
        grid_sizes=tuple(grids),
        replications=reps,
        psi_family=cfg.psi_family,
        psi_p=p,
        seed=cfg.seed,
        out_dir=cfg.out_dir,
        overwrite=cfg.overwrite,
    )


def _psi_of(cfg: ExperimentConfig) -> regularity.RegularityFunction:
    if cfg.psi_family == "power":
        return power(cfg.psi_p)
    return psi(cfg.psi_p, flavor=int(cfg.psi_family[-1]))


@dataclass(frozen=True)
class Verdict:
    id: str
    criterion: str
    claim: str
    passed: bool
    details: dict


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    columns: list[str]
    rows: list[tuple]
    summaries: list[dict]
    tail_fits: list[dict] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def _rep_seed(cfg: ExperimentConfig, grid_index: int, rep: int) -> RngSeed:
    return RngSeed(master=cfg.seed, index=grid_index * 1_000_000 + rep)


def _median_iqr(values: np.ndarray) -> tuple[float, float]:
    q25, q50, q75 = np.percentile(values, [25, 50, 75])
    return float(q50), float(q75 - q25)


def _summaries_by_grid(columns, rows, value_columns) -> list[dict]:
    arr = {c: np.array([r[columns.index(c)] for r in rows]) for c in columns}
    out = []
    for n in sorted(set(int(v) for v in arr["grid_size"])):
        mask = arr["grid_size"] == n
        entry = {"grid_size": n, "count": int(mask.sum())}
        for c in value_columns:
            med, iqr = _median_iqr(arr[c][mask])
            entry[f"{c}_median"] = med
            entry[f"{c}_iqr"] = iqr
        out.append(entry)
    return out


def _sample_path(cfg: ExperimentConfig, n: int, d: int, seed: RngSeed) -> SampledPath:
    if cfg.model == "bm":
        return sample_bm(n, d, seed)
    hurst = float(cfg.model.split(":", 1)[1])
    return sample_fbm(hurst, n, d, seed)


def _longest_increase_run(values: list[float]) -> int:
    best = run = 0
    for a, b in zip(values, values[1:]):
        run = run + 1 if b > a else 0
        best = max(best, run)
    return best


# -- taylor: stabilization of psi-variation vs divergence of plain power sums


def _run_taylor(cfg: ExperimentConfig):
    f = _psi_of(cfg)
    f_pow = power(cfg.psi_p)
    columns = ["grid_size", "replication", "psi_variation", "power_variation"]
    rows = []
    for gi, n in enumerate(cfg.grid_sizes):
        for rep in range(cfg.replications):
            path = _sample_path(cfg, n, 1, _rep_seed(cfg, gi, rep))
            v_psi = psi_variation(path, f).value
            v_pow = psi_variation(path, f_pow).value
            rows.append((n, rep, v_psi, v_pow))
    summaries = _summaries_by_grid(columns, rows, ["psi_variation", "power_variation"])
    med_psi = [s["psi_variation_median"] for s in summaries]
    med_pow = [s["power_variation_median"] for s in summaries]
    spread = max(med_psi) / min(med_psi) if min(med_psi) > 0 else math.inf
    growth = med_pow[-1] / med_pow[0] if med_pow[0] > 0 else math.inf
    run = _longest_increase_run(med_pow)
    verdicts = [
        Verdict(
            id="taylor-stabilization",
            criterion="criterion-04a",
            claim="iterated-log-corrected variation of the sampled path stabilizes under grid refinement",
            passed=bool(spread < 2.0),
            details={"medians": med_psi, "max_over_min": spread},
        ),
        Verdict(
            id="taylor-divergence",
            criterion="criterion-04b",
            claim="uncorrected power-sum variation keeps growing as the grid refines",
            passed=bool(run >= 4 and growth >= 2.0),
            details={"medians": med_pow, "growth_factor": growth, "longest_increase_run": run},
        ),
    ]
    return columns, rows, summaries, [], verdicts


# -- levy_area: Gauss tail of the homogeneous area norm, exp tail of raw area


def _run_levy_area(cfg: ExperimentConfig):
    f_area = compose_with_sqrt(_psi_of(cfg))
    n = cfg.grid_sizes[0]
    columns = ["grid_size", "replication", "area_norm", "abs_area_01"]
    rows = []
    for rep in range(cfg.replications):
        seed = _rep_seed(cfg, 0, rep)
        path = sample_bm(n, 2, seed)
        gp = enhance_to_rough_path(path, level=2, substeps=4, seed=seed)
        apath = SampledPath.from_group(gp, metric="area")
        norm = psi_variation_norm(apath, f_area)
        a01 = float(np.linalg.norm(levy_area_increment(gp, 0.0, 1.0)))
        rows.append((n, rep, norm, a01))
    summaries = _summaries_by_grid(columns, rows, ["area_norm", "abs_area_01"])
    norms = np.array([r[2] for r in rows])
    areas = np.array([r[3] for r in rows])
    fit_norm = fit_tail(norms)
    fit_area = fit_tail(areas)
    tail_fits = [
        dict(target="area_norm", model=fit_norm.model, eta=fit_norm.eta, quality=fit_norm.quality,
             gauss_quality=fit_norm.gauss_quality, exp_quality=fit_norm.exp_quality),
        dict(target="abs_area_01", model=fit_area.model, eta=fit_area.eta, quality=fit_area.quality,
             gauss_quality=fit_area.gauss_quality, exp_quality=fit_area.exp_quality),
    ]
    verdicts = [
        Verdict(
            id="levy-area-norm-gauss-tail",
            criterion="criterion-05",
            claim="the square-root-composed variation norm of the area has a Gaussian tail",
            passed=bool(fit_norm.model == "gauss" and fit_norm.quality >= 0.9),
            details=tail_fits[0],
        ),
        Verdict(
            id="levy-area-raw-exponential",
            criterion="criterion-05",
            claim="the raw area at time one has an exponential, not Gaussian, tail",
            passed=bool(fit_area.model == "exp"),
            details=tail_fits[1],
        ),
    ]
    return columns, rows, summaries, tail_fits, verdicts


# -- gauss_tail: Gauss tail of the homogeneous rough-path variation norm


def _run_gauss_tail(cfg: ExperimentConfig):
    f = _psi_of(cfg)
    n = cfg.grid_sizes[0]
    columns = ["grid_size", "replication", "cc_norm"]
    rows = []
    for rep in range(cfg.replications):
        seed = _rep_seed(cfg, 0, rep)
        path = _sample_path(cfg, n, 2, seed)
        gp = enhance_to_rough_path(path, level=2)
        norm = psi_variation_norm(SampledPath.from_group(gp, metric="cc"), f)
        rows.append((n, rep, norm))
    summaries = _summaries_by_grid(columns, rows, ["cc_norm"])
    fit = fit_tail(np.array([r[2] for r in rows]))
    tail_fits = [
        dict(target="cc_norm", model=fit.model, eta=fit.eta, quality=fit.quality,
             gauss_quality=fit.gauss_quality, exp_quality=fit.exp_quality)
    ]
    verdicts = [
        Verdict(
            id="rough-path-norm-gauss-tail",
            criterion="criterion-06",
            claim="the homogeneous variation norm of the enhanced path has a Gaussian tail",
            passed=bool(fit.model == "gauss" and fit.quality >= 0.9),
            details=tail_fits[0],
        )
    ]
    return columns, rows, summaries, tail_fits, verdicts


# -- lil: small-time oscillation and area against the iterated-log modulus


def _run_lil(cfg: ExperimentConfig):
    phi22 = regularity.phi(2.0, flavor=2)
    n = cfg.grid_sizes[0]
    ks = range(4, 13)
    columns = ["grid_size", "replication", "osc_ladder_max", "area_ladder_max"]
    rows = []
    for rep in range(cfg.replications):
        seed = _rep_seed(cfg, 0, rep)
        path = sample_bm(n, 2, seed)
        times = path.times
        comp = path.values[:, 0]
        run_max = np.maximum.accumulate(comp)
        run_min = np.minimum.accumulate(comp)
        gp = lift_piecewise_linear(path.values, times, level=2)
        a01 = 0.5 * (gp.levels[2][:, 0, 1] - gp.levels[2][:, 1, 0])
        osc_best = 0.0
        area_best = 0.0
        for k in ks:
            j = int(np.searchsorted(times, 2.0**-k - 1e-12, side="left"))
            h = float(times[j])
            denom = regularity.evaluate(phi22, h)
            osc_best = max(osc_best, float(run_max[j] - run_min[j]) / denom)
            area_best = max(area_best, math.sqrt(abs(float(a01[j]))) / denom)
        rows.append((n, rep, osc_best, area_best))
    summaries = _summaries_by_grid(columns, rows, ["osc_ladder_max", "area_ladder_max"])
    med_osc = summaries[0]["osc_ladder_max_median"]
    med_area = summaries[0]["area_ladder_max_median"]
    verdicts = [
        Verdict(
            id="lil-oscillation-band",
            criterion="criterion-07",
            claim="small-time oscillation over the iterated-log modulus sits near the classical constant",
            passed=bool(0.5 <= med_osc <= 3.0),
            details={"median_ladder_max": med_osc, "band": [0.5, 3.0]},
        ),
        Verdict(
            id="lil-area-positive",
            criterion="criterion-07",
            claim="the square-rooted small-time area over the iterated-log modulus stays away from zero",
            passed=bool(med_area >= 0.05),
            details={"median_ladder_max": med_area, "floor": 0.05},
        ),
    ]
    return columns, rows, summaries, [], verdicts


# -- lift: stability of the step-N lifting estimate in variation norm


def _run_lift(cfg: ExperimentConfig):
    from .nilpotent import GroupPath, cc_distance_matrices_by_level

    f = _psi_of(cfg)
    columns = ["grid_size", "replication", "norm_step2", "ratio_step3", "ratio_step4"]
    rows = []
    for gi, n in enumerate(cfg.grid_sizes):
        for rep in range(cfg.replications):
            seed = _rep_seed(cfg, gi, rep)
            path = sample_bm(n, 2, seed)
            # one step-4 lift; lower steps are its truncations
            gp4 = lift_piecewise_linear(path.values, path.times, level=4)
            dists = cc_distance_matrices_by_level(gp4, (2, 3, 4))
            norms = {}
            for level in (2, 3, 4):
                gp = GroupPath(times=gp4.times, levels=gp4.levels[: level + 1])
                norms[level] = psi_variation_norm(
                    SampledPath.from_group(gp, metric="cc", precomputed_distances=dists[level]), f
                )
            rows.append((n, rep, norms[2], norms[3] / norms[2], norms[4] / norms[2]))
    summaries = _summaries_by_grid(columns, rows, ["norm_step2", "ratio_step3", "ratio_step4"])
    verdicts = []
    for level, col in ((3, "ratio_step3"), (4, "ratio_step4")):
        idx = columns.index(col)
        by_grid = []
        finite = True
        for n in cfg.grid_sizes:
            vals = np.array([r[idx] for r in rows if r[0] == n])
            finite = finite and bool(np.all(np.isfinite(vals)))
            by_grid.append(float(np.percentile(vals, 99)))
        stable = all(
            1.0 / 1.5 <= b / a <= 1.5 for a, b in zip(by_grid, by_grid[1:])
        )
        verdicts.append(
            Verdict(
                id=f"lift-ratio-stable-step{level}",
                criterion="criterion-08",
                claim=f"the step-{level} lift's variation norm stays a stable multiple of the step-2 norm",
                passed=bool(finite and stable),
                details={"q99_by_grid": by_grid, "finite": finite},
            )
        )
    return columns, rows, summaries, [], verdicts


# -- translate: boundedness of the translation comparison ratio


_H_SEGMENTS = 16
_H_TAG = 417


def _run_translate(cfg: ExperimentConfig):
    f = _psi_of(cfg)
    columns = ["grid_size", "replication", "lhs", "rhs", "ratio"]
    rows = []
    for gi, n in enumerate(cfg.grid_sizes):
        for rep in range(cfg.replications):
            seed = _rep_seed(cfg, gi, rep)
            path = sample_bm(n, 2, seed)
            y = lift_piecewise_linear(path.values, path.times, level=2)
            rng = generator(seed, tag=_H_TAG)
            steps = rng.standard_normal((_H_SEGMENTS, 2))
            steps /= np.sum(np.linalg.norm(steps, axis=1))  # unit 1-variation
            h_vals = np.vstack([np.zeros((1, 2)), np.cumsum(steps, axis=0)])
            h = SampledPath.euclidean(np.linspace(0.0, 1.0, _H_SEGMENTS + 1), h_vals)
            tb = translation_bound_ratio(y, h, f, rho=1.0)
            rows.append((n, rep, tb.lhs, tb.rhs, tb.ratio))
    summaries = _summaries_by_grid(columns, rows, ["lhs", "rhs", "ratio"])
    max_by_grid = []
    finite = True
    for n in cfg.grid_sizes:
        vals = np.array([r[4] for r in rows if r[0] == n])
        finite = finite and bool(np.all(np.isfinite(vals)))
        max_by_grid.append(float(vals.max()))
    stable = all(0.5 <= b / a <= 2.0 for a, b in zip(max_by_grid, max_by_grid[1:]))
    verdicts = [
        Verdict(
            id="translation-ratio-bounded",
            criterion="criterion-09",
            claim="the translated path's norm is controlled by the norm of the path plus the shift",
            passed=bool(finite and stable),
            details={"max_ratio_by_grid": max_by_grid, "finite": finite},
        )
    ]
    return columns, rows, summaries, [], verdicts


# -- borell: half-space isoperimetry and the Gaussian-norm tail exponent


_BORELL_AS = (-1.0, 0.0, 1.0)
_BORELL_RS = (0.0, 0.5, 1.0, 2.0)
_BORELL_DIMS = (2, 10)
_Z_TAG = 733


def _run_borell(cfg: ExperimentConfig):
    m = cfg.replications
    columns = ["dim", "a", "r", "exact_bound", "estimate", "stderr", "check_passed"]
    rows = []
    idx = 0
    all_pass = True
    monotone = True
    for dim in _BORELL_DIMS:
        for a in _BORELL_AS:
            prev = -1.0
            for r in _BORELL_RS:
                check = borell_halfspace_check(a, r, dim, m, _rep_seed(cfg, 0, idx))
                idx += 1
                rows.append((dim, a, r, check.exact_bound, check.estimate, check.stderr, int(check.passed)))
                all_pass = all_pass and check.passed
                monotone = monotone and check.exact_bound > prev
                prev = check.exact_bound
    z = np.abs(generator(RngSeed(cfg.seed, 0), tag=_Z_TAG).standard_normal(m))
    fit = fit_tail(z)
    tail_fits = [
        dict(target="abs_gaussian", model=fit.model, eta=fit.eta, quality=fit.quality,
             gauss_quality=fit.gauss_quality, exp_quality=fit.exp_quality)
    ]
    verdicts = [
        Verdict(
            id="borell-halfspace-bound",
            criterion="criterion-10",
            claim="enlarged half-space mass matches the normal-quantile lower bound within MC error",
            passed=bool(all_pass),
            details={"checks": len(rows), "all_passed": all_pass},
        ),
        Verdict(
            id="borell-bound-monotone",
            criterion="criterion-10",
            claim="the exact enlargement bound increases strictly with the radius",
            passed=bool(monotone),
            details={},
        ),
        Verdict(
            id="fernique-eta-band",
            criterion="criterion-10",
            claim="the absolute-Gaussian tail exponent sits near one half",
            passed=bool(fit.model == "gauss" and 0.4 <= fit.eta <= 0.55),
            details=tail_fits[0],
        ),
    ]
    # borell rows are not grid-indexed; summaries keep the estimate spread
    summaries = [
        {
            "grid_size": 0,
            "count": len(rows),
            "max_bound_gap": max(r[3] - r[4] for r in rows),
        }
    ]
    return columns, rows, summaries, tail_fits, verdicts


_RUNNERS = {
    "taylor": _run_taylor,
    "levy_area": _run_levy_area,
    "gauss_tail": _run_gauss_tail,
    "lil": _run_lil,
    "lift": _run_lift,
    "translate": _run_translate,
    "borell": _run_borell,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run all replications of the named experiment; deterministic given the seed."""
    cfg = _resolve(config)
    notes = []
    if cfg.model.startswith("fbm:"):
        hurst = float(cfg.model.split(":", 1)[1])
        if hurst <= 1.0 / 3.0:
            notes.append(
                f"H={hurst:g} <= 1/3: covariance 2D-variation exponent is 3/2 or worse, "
                "outside the hypothesis backing the Gauss-tail claim"
            )
    start = time.perf_counter()
    columns, rows, summaries, tail_fits, verdicts = _RUNNERS[cfg.experiment](cfg)
    return ExperimentReport(
        config=cfg,
        columns=columns,
        rows=rows,
        summaries=summaries,
        tail_fits=tail_fits,
        verdicts=verdicts,
        notes=notes,
        wall_clock=time.perf_counter() - start,
    )


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def write_report(report: ExperimentReport, directory, overwrite: bool = False) -> dict:
    """Write summary.json, raw.csv and manifest.json; refuse to clobber."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    summary_path = directory / "summary.json"
    if summary_path.exists() and not overwrite:
        raise FileExistsError(f"{summary_path} exists; pass overwrite to replace it")
    summary = {
        "experiment": report.config.experiment,
        "config": asdict(report.config),
        "summaries": report.summaries,
        "tail_fits": report.tail_fits,
        "verdicts": [asdict(v) for v in report.verdicts],
        "notes": report.notes,
        "all_passed": report.passed,
        "wall_clock_seconds": report.wall_clock,
    }
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    files = ["summary.json"]
    if report.rows:
        raw_path = directory / "raw.csv"
        with raw_path.open("w", encoding="utf-8") as fh:
            fh.write(",".join(report.columns) + "\n")
            for row in report.rows:
                fh.write(",".join(_format_cell(v) for v in row) + "\n")
        files.append("raw.csv")
    manifest = {
        "files": [
            {"name": name, "sha256": _sha256(directory / name), "bytes": (directory / name).stat().st_size}
            for name in files
        ]
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest
