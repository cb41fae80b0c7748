import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lptime.basis import lp_transform
from lptime.comoment import (
    ComomentMatrix,
    bic_path,
    bic_smooth,
    comoment,
    comoment_from_pmf,
    lp_autocorrelation,
    lp_comoment_matrix,
    lp_correlogram,
    lpinfor_stat,
    nonstationarity_comoment,
)
from lptime.empirical import mid_rank_series
from lptime.errors import InsufficientOverlap
from lptime.simulate import ar_process, arch1, iid_normal

# lag-1 comoment matrix of daily S&P 500 returns (n = 11825); BIC keeps the
# six entries listed in SP500_SELECTED
SP500_LAG1 = np.array([
    [0.0705, -0.0617, 0.0199, 0.0113],
    [0.0074, 0.1542, 0.0077, 0.0652],
    [-0.0104, -0.0071, 0.0262, -0.0355],
    [0.0166, 0.0438, 0.0113, 0.0698],
])
SP500_SELECTED = {(0, 0), (0, 1), (1, 1), (1, 3), (3, 1), (3, 3)}


def pearson_of_pmf(x, y, pmf):
    pmf = pmf / pmf.sum()
    px, py = pmf.sum(1), pmf.sum(0)
    mx, my = px @ x, py @ y
    sx = math.sqrt(px @ (x - mx) ** 2)
    sy = math.sqrt(py @ (y - my) ** 2)
    return float((x - mx) @ pmf @ (y - my)) / (sx * sy)


def test_sp500_matrix_bic_selects_six_entries():
    mat = bic_smooth(ComomentMatrix(1, SP500_LAG1, 11825))
    assert {tuple(ix) for ix in np.argwhere(mat.mask)} == SP500_SELECTED
    assert lpinfor_stat(mat) == pytest.approx(0.0436, abs=5e-5)


def test_sp500_pearson_from_smooth_inputs():
    mom = np.array([0.872, 0, 0.331, 0, 0.191])
    c = np.zeros((5, 5))
    c[0, 0] = 0.0705
    assert lp_autocorrelation(mom, mom, c) == pytest.approx(0.0536, abs=5e-5)
    assert lp_autocorrelation(mom, mom, np.zeros((5, 5))) == 0.0


def test_autocorrelation_shape_mismatch():
    with pytest.raises(ValueError):
        lp_autocorrelation(np.ones(3), np.ones(4), np.zeros((3, 3)))


def test_bic_smooth_edge_cases():
    zero = bic_smooth(ComomentMatrix(1, np.zeros((4, 4)), 10_000))
    assert not zero.mask.any() and np.all(zero.smooth == 0)
    one = np.zeros((4, 4))
    one[2, 1] = 1.0
    sm = bic_smooth(ComomentMatrix(1, one, 10_000))
    assert sm.mask.sum() == 1 and sm.smooth[2, 1] == 1.0


def test_bic_ties_follow_row_major_order():
    raw = np.full((2, 2), 0.3)
    order, _ = bic_path(raw, 10)
    np.testing.assert_array_equal(order, [0, 1, 2, 3])
    raw = np.array([[0.0, -0.5], [0.5, 0.0]])
    order, _ = bic_path(raw, 10)
    np.testing.assert_array_equal(order[:2], [1, 2])


@given(st.lists(st.floats(-0.3, 0.3), min_size=16, max_size=16), st.integers(50, 10**6))
@settings(max_examples=80)
def test_bic_smooth_idempotent_and_is_masked_copy(vals, n):
    raw = np.reshape(vals, (4, 4))
    sm = bic_smooth(ComomentMatrix(1, raw, n))
    np.testing.assert_array_equal(sm.smooth, np.where(sm.mask, raw, 0.0))
    again = bic_smooth(ComomentMatrix(1, sm.smooth, n))
    np.testing.assert_array_equal(again.smooth, sm.smooth)
    m = int(sm.mask.sum())
    assert sm.bic_path[m] == pytest.approx(sm.bic_path.max())
    assert sm.bic_path[0] == 0.0


def test_iid_entries_small():
    s = lp_transform(iid_normal(100_000, 1), 4)
    for h in (1, 5):
        assert np.max(np.abs(lp_comoment_matrix(s, h).raw)) < 4 / math.sqrt(s.T)


def test_comonotone_copy_gives_identity():
    x = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    pmf = np.diag([0.1, 0.3, 0.2, 0.25, 0.15])
    mat, _, _ = comoment_from_pmf(x, x, pmf)
    np.testing.assert_allclose(mat.raw, np.eye(4), atol=1e-8)


def test_slowly_varying_series_has_unit_lag_one_diagonal():
    # Y(t+1) = Y(t) up to one rank step: lag-1 diagonal tends to 1
    s = lp_transform(np.arange(20_000.0), 4)
    mat = lp_comoment_matrix(s, 1)
    np.testing.assert_allclose(np.diag(mat.raw), 1.0, atol=5e-3)
    cg = lp_correlogram(s, 1)
    np.testing.assert_allclose(cg.table[:, 0], 1.0, atol=5e-3)


def test_gaussian_ar1_matches_spearman():
    rho = 0.6
    s = lp_transform(ar_process([rho], 100_000, seed=2, scale=math.sqrt(1 - rho**2)), 4)
    target = 6 / math.pi * math.asin(rho / 2)
    assert lp_comoment_matrix(s, 1).raw[0, 0] == pytest.approx(target, abs=0.015)


def test_overlap_guard():
    s = lp_transform(iid_normal(30, 3), 2)
    with pytest.raises(InsufficientOverlap):
        lp_comoment_matrix(s, 21)
    with pytest.raises(ValueError):
        lp_comoment_matrix(s, 0)
    with pytest.raises(InsufficientOverlap):
        lp_correlogram(s, 8)


def test_rank_invariance():
    x = iid_normal(2000, 4)
    a = comoment(lp_transform(x, 4), 2).raw
    b = comoment(lp_transform(np.exp(x), 4), 2).raw
    np.testing.assert_allclose(a, b, atol=1e-10)


@st.composite
def joint_pmfs(draw):
    nx, ny = draw(st.integers(2, 5)), draw(st.integers(2, 5))
    w = draw(st.lists(st.floats(0.05, 1.0), min_size=nx * ny, max_size=nx * ny))
    xs = draw(st.lists(st.integers(-20, 20), min_size=nx, max_size=nx, unique=True))
    ys = draw(st.lists(st.integers(-20, 20), min_size=ny, max_size=ny, unique=True))
    return np.array(xs, float), np.array(ys, float), np.reshape(w, (nx, ny))


@given(joint_pmfs())
@settings(max_examples=60, deadline=None)
def test_pearson_decomposition_on_pmfs(case):
    x, y, pmf = case
    mat, mx, my = comoment_from_pmf(x, y, pmf)
    got = lp_autocorrelation(mx, my, mat, use_smooth=False)
    assert got == pytest.approx(pearson_of_pmf(x, y, pmf), abs=1e-8)


def test_correlogram_first_row_is_midrank_acf():
    x = ar_process([0.4], 3000, seed=5)
    s = lp_transform(x, 3)
    cg = lp_correlogram(s, 10)
    r = mid_rank_series(x)
    r = (r - r.mean()) / r.std()
    acf = [np.mean(r[:-h] * r[h:]) for h in range(1, 11)]
    np.testing.assert_allclose(cg.table[0], acf, atol=1e-12)


def test_correlogram_iid_and_arch():
    s = lp_transform(iid_normal(5000, 6), 4)
    cg = lp_correlogram(s, 20)
    assert cg.band == pytest.approx(1.96 / math.sqrt(5000))
    assert cg.outside_band().mean() <= 0.10
    a = lp_correlogram(lp_transform(arch1(10_000, 7), 4), 10)
    assert np.mean(a.outside_band()[0]) <= 0.2
    assert np.all(a.table[1, :3] > a.band)


def test_nonstationarity_examples():
    T = 100_000
    rng = np.random.default_rng(8)
    eps = rng.standard_normal(T)
    iid = nonstationarity_comoment(eps)
    assert np.max(np.abs(iid.raw)) < 4 / math.sqrt(T)
    t = np.arange(1, T + 1) / T
    trend = nonstationarity_comoment(t + eps)
    assert trend.raw[0, 0] > 10 / math.sqrt(T)
    drift = nonstationarity_comoment((1 + t) * eps)
    assert abs(drift.raw[0, 1]) > 10 / math.sqrt(T)
    assert abs(drift.raw[0, 0]) < 4 / math.sqrt(T)
    assert lpinfor_stat(iid, use_smooth=False) < lpinfor_stat(trend, use_smooth=False)
