import math

import numpy as np
import pytest
from scipy import stats

from roughvar import gaussian as gs
from roughvar.nilpotent import levy_area_increment


def test_bm_determinism_and_start():
    a = gs.sample_bm(64, 2, gs.RngSeed(7, 3))
    b = gs.sample_bm(64, 2, gs.RngSeed(7, 3))
    assert np.array_equal(a.values, b.values)
    assert np.all(a.values[0] == 0.0)
    c = gs.sample_bm(64, 2, gs.RngSeed(7, 4))
    assert not np.array_equal(a.values, c.values)


def test_bm_quadratic_variation_mean():
    total = 0.0
    reps = 10_000
    for rep in range(reps):
        path = gs.sample_bm(65, 1, gs.RngSeed(1, rep))
        total += float(np.sum(np.diff(path.values[:, 0]) ** 2))
    assert 0.98 <= total / reps <= 1.02


def test_fbm_matches_bm_at_half():
    # Kolmogorov-Smirnov on the endpoint distribution over many samples
    ends_f = np.array(
        [gs.sample_fbm(0.5, 32, 1, gs.RngSeed(2, r)).values[-1, 0] for r in range(10_000)]
    )
    ends_b = np.array(
        [gs.sample_bm(32, 1, gs.RngSeed(3, r)).values[-1, 0] for r in range(10_000)]
    )
    assert stats.ks_2samp(ends_f, ends_b).pvalue > 0.01


def test_fbm_determinism_and_variance():
    a = gs.sample_fbm(0.4, 64, 2, gs.RngSeed(9, 0))
    b = gs.sample_fbm(0.4, 64, 2, gs.RngSeed(9, 0))
    assert np.array_equal(a.values, b.values)
    ends = np.array(
        [gs.sample_fbm(0.4, 33, 1, gs.RngSeed(4, r)).values[-1, 0] for r in range(10_000)]
    )
    assert 0.95 <= float(np.mean(ends**2)) <= 1.05


def test_fbm_rejects_bad_parameters():
    with pytest.raises(ValueError):
        gs.sample_fbm(1.2, 64, 1, gs.RngSeed(0))
    with pytest.raises(ValueError):
        gs.sample_fbm(0.4, 8192, 1, gs.RngSeed(0))


def test_model_parsing_and_validation():
    assert gs.model_from_name("bm").rho == 1.0
    m = gs.model_from_name("fbm:0.4")
    assert m.rho == pytest.approx(1.25)
    with pytest.raises(ValueError):
        gs.model_from_name("poisson")
    grid = np.linspace(0.0, 1.0, 24)
    gs.validate_covariance(gs.brownian_model(), grid)
    gs.validate_covariance(gs.fbm_model(0.3), grid)
    bad = gs.CovarianceModel(name="bad", R=lambda s, t: s - t, rho=1.0)
    with pytest.raises(ValueError):
        gs.validate_covariance(bad, grid)


def test_enhance_smooth_parabola_area():
    # the curve (t, t^2) encloses signed area 1/6 against its chord structure
    def area_err(n):
        t = np.linspace(0.0, 1.0, n)
        pts = np.column_stack([t, t**2])
        path = gs.SampledPath.euclidean(t, pts)
        gp = gs.enhance_to_rough_path(path, level=2)
        return abs(levy_area_increment(gp, 0.0, 1.0)[0, 1] - 1.0 / 6.0)

    e64, e128 = area_err(64), area_err(128)
    assert e64 < 1e-3
    assert e128 < e64 / 2.0  # second-order shrinkage


def test_enhance_straight_line_zero_area():
    t = np.linspace(0.0, 1.0, 33)
    pts = np.column_stack([2 * t, -t])
    path = gs.SampledPath.euclidean(t, pts)
    gp = gs.enhance_to_rough_path(path, level=2)
    for j in (8, 16, 32):
        assert abs(levy_area_increment(gp, 0.0, gp.times[j])).max() < 1e-14


def test_enhance_substep_ladder_converges():
    diffs_14, diffs_416 = [], []
    for rep in range(24):
        seed = gs.RngSeed(11, rep)
        path = gs.sample_bm(512, 2, seed)
        areas = {}
        for sub in (1, 4, 16):
            gp = gs.enhance_to_rough_path(path, level=2, substeps=sub, seed=seed)
            areas[sub] = levy_area_increment(gp, 0.0, 1.0)[0, 1]
        diffs_14.append(abs(areas[4] - areas[1]))
        diffs_416.append(abs(areas[16] - areas[4]))
    assert np.median(diffs_416) < np.median(diffs_14)


def test_enhance_errors():
    path = gs.sample_fbm(0.4, 32, 2, gs.RngSeed(0))
    with pytest.raises(ValueError):
        gs.enhance_to_rough_path(path, level=2, substeps=4, seed=gs.RngSeed(0))
    bm = gs.sample_bm(32, 2, gs.RngSeed(0))
    with pytest.raises(ValueError):
        gs.enhance_to_rough_path(bm, level=2, substeps=3, seed=gs.RngSeed(0))
    with pytest.raises(ValueError):
        gs.enhance_to_rough_path(bm, level=2, substeps=4)  # refinement needs a seed


def test_substep_refinement_is_nested():
    seed = gs.RngSeed(13, 5)
    path = gs.sample_bm(64, 1, seed)
    t4, v4 = gs._bridge_refine(path.times, path.values, 2, seed)
    t16, v16 = gs._bridge_refine(path.times, path.values, 4, seed)
    assert np.allclose(v16[::4], v4)
    assert np.allclose(t16[::4], t4)


def test_studentized_increment_moments_subgaussian():
    # pooled dyadic increment ratios d(X_s, X_t)/|t-s|^{1/p} keep L^{2q}
    # norms growing like sqrt(q)
    p = 2.5
    pool = []
    n = 257
    for rep in range(200):
        path = gs.sample_bm(n, 1, gs.RngSeed(17, rep))
        vals = path.values[:, 0]
        times = path.times
        for k in (1, 2, 4, 8, 16, 32):
            step = (n - 1) // k
            idx = np.arange(0, n, step)
            inc = np.abs(np.diff(vals[idx]))
            gap = np.diff(times[idx])
            pool.append(inc / gap ** (1.0 / p))
    pool = np.concatenate(pool)
    qs = np.arange(1, 7)
    norms = np.array([float(np.mean(pool ** (2 * q))) ** (1.0 / (2 * q)) for q in qs])
    c = max(norms[0] / math.sqrt(1), norms[1] / math.sqrt(2))
    assert np.all(norms <= 1.5 * c * np.sqrt(qs))


def test_seed_isolation_cross_correlation():
    a = np.diff(gs.sample_bm(1024, 1, gs.RngSeed(8, 0)).values[:, 0])
    b = np.diff(gs.sample_bm(1024, 1, gs.RngSeed(8, 1)).values[:, 0])
    r = np.corrcoef(a, b)[0, 1]
    assert abs(r) < 0.05


def test_csv_export_roundtrip(tmp_path):
    from roughvar.nilpotent import read_path_csv, write_path_csv

    path = gs.sample_bm(17, 2, gs.RngSeed(29, 0))
    fname = tmp_path / "bm.csv"
    write_path_csv(fname, path.times, path.values)
    t, v = read_path_csv(fname)
    assert np.array_equal(v, path.values)
