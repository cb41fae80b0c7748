import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from lptime.basis import LegendreBasis, build_score_basis, legendre_antiderivative
from lptime.copula import (
    CopulaModel,
    auto_lpinfor,
    bivariate_normal_diagonal,
    blomqvist_beta,
    clipped_density,
    conditional_beta,
    conditional_comparison_density,
    conditional_lpinfor,
    copula_cdf,
    copula_density,
    gaussian_copula_curve,
    granger_lin,
    quantile_correlation,
    serial_copula,
)
from lptime.basis import lp_transform
from lptime.empirical import empirical_mid_distribution
from lptime.errors import InvalidProbability
from lptime.simulate import arch1

GRID99 = np.arange(1, 100) / 100
coef_entries = st.lists(st.floats(-0.2, 0.2), min_size=16, max_size=16).map(lambda v: np.reshape(v, (4, 4)))


def gauss_on(a, b, n=40):
    x, w = np.polynomial.legendre.leggauss(n)
    return a + (b - a) * (x + 1) / 2, w * (b - a) / 2


def empirical_model(coef, seed=0):
    x = np.random.default_rng(seed).poisson(4, 400)
    b = build_score_basis(empirical_mid_distribution(x), 4)
    return CopulaModel(coef[: b.k, : b.k], b, b)


def brute_square_on_cells(model, box=1.0):
    """Cell-by-cell integral of cop^2 and of cop over [0, box]^2."""
    d = model.row_basis.dist
    edges = d.cell_edges
    width = np.clip(np.minimum(edges[1:], box) - edges[:-1], 0, None)
    mids = d.middist
    total, square = 0.0, 0.0
    for i in range(mids.size):
        for l in range(mids.size):
            c = copula_density(model, mids[i], mids[l])
            total += width[i] * width[l] * c
            square += width[i] * width[l] * c * c
    return total, square


def test_independence_density_and_cdf():
    m = CopulaModel.legendre(np.zeros((4, 4)))
    u = np.array([0.1, 0.4, 0.9])
    np.testing.assert_allclose(copula_density(m, u, u[::-1]), 1.0)
    np.testing.assert_allclose(copula_cdf(m, u, u[::-1]), u * u[::-1], atol=1e-15)
    assert blomqvist_beta(m) == 0.0
    assert auto_lpinfor(m) == 0.0
    assert granger_lin(m) == pytest.approx(0.0, abs=1e-14)
    assert clipped_density(m, 0.3, 0.4) == (pytest.approx(1.0), pytest.approx(1.0))
    np.testing.assert_allclose(quantile_correlation(m, GRID99), np.minimum(GRID99, 1 - GRID99), atol=1e-10)
    np.testing.assert_allclose(conditional_comparison_density(m, 0.2, u), 1.0)
    assert conditional_lpinfor(m, 0.3) == 0.0


@pytest.mark.parametrize("c", [0.05, -0.2, 0.3])
def test_single_entry_closed_forms(c):
    m = CopulaModel.legendre([[c]])
    u, v = 0.3, 0.85
    assert copula_density(m, u, v) == pytest.approx(1 + 12 * c * (u - 0.5) * (v - 0.5))
    i1 = lambda x: math.sqrt(12) * (x * x / 2 - x / 2)
    assert copula_cdf(m, u, v) == pytest.approx(u * v + c * i1(u) * i1(v), abs=1e-14)
    assert blomqvist_beta(m) == pytest.approx(0.75 * c, abs=1e-12)
    assert conditional_beta(m, u, 1) == pytest.approx(c * math.sqrt(12) * (u - 0.5))


def test_sp500_blomqvist_value():
    assert blomqvist_beta(CopulaModel.legendre([[0.0705]])) == pytest.approx(0.0529, abs=5e-5)


def test_odd_scores_only_contribute_at_half():
    for j in range(1, 9):
        val = legendre_antiderivative(j, 0.5)
        if j % 2 == 0:
            assert val == pytest.approx(0.0, abs=1e-14)
        else:
            assert abs(val) > 1e-3


@given(coef_entries)
@settings(max_examples=40, deadline=None)
def test_legendre_blomqvist_matches_2d_quadrature(coef):
    m = CopulaModel.legendre(coef)
    x, w = gauss_on(0, 0.5, 20)
    uu, vv = np.meshgrid(x, x, indexing="ij")
    quad = -1 + 4 * float(w @ m.density(uu, vv) @ w)
    assert blomqvist_beta(m) == pytest.approx(quad, abs=1e-10)


@given(coef_entries, st.integers(0, 5))
@settings(max_examples=15, deadline=None)
def test_empirical_blomqvist_and_parseval_by_cells(coef, seed):
    m = empirical_model(coef, seed)
    total, _ = brute_square_on_cells(m, box=0.5)
    assert blomqvist_beta(m) == pytest.approx(-1 + 4 * total, abs=1e-10)
    total, square = brute_square_on_cells(m)
    assert total == pytest.approx(1.0, abs=1e-10)
    assert auto_lpinfor(m) == pytest.approx(square - 1, abs=1e-10)
    assert m.integral_of_square() - 1 == pytest.approx(auto_lpinfor(m), abs=1e-10)


@given(coef_entries)
@settings(max_examples=30, deadline=None)
def test_legendre_parseval_and_marginals(coef):
    m = CopulaModel.legendre(coef)
    x, w = gauss_on(0, 1, 30)
    grid = m.density_grid(x, x)
    assert float(w @ grid @ w) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(grid @ w, 1.0, atol=1e-10)
    assert float(w @ grid**2 @ w) - 1 == pytest.approx(auto_lpinfor(m), abs=1e-10)
    for u in (0.05, 0.5, 0.77):
        d = conditional_comparison_density(m, u, x)
        assert float(w @ d**2) - 1 == pytest.approx(conditional_lpinfor(m, u), abs=1e-10)
        assert float(w @ d) == pytest.approx(1.0, abs=1e-10)


@given(coef_entries)
@settings(max_examples=20, deadline=None)
def test_symmetric_comparison_density(coef):
    m = CopulaModel.legendre(coef + coef.T)
    for u, v in ((0.1, 0.7), (0.45, 0.95)):
        assert conditional_comparison_density(m, u, v) == pytest.approx(
            conditional_comparison_density(m, v, u), abs=1e-14)


@given(coef_entries)
@settings(max_examples=25, deadline=None)
def test_quantile_correlation_continuous_at_half(coef):
    m = CopulaModel.legendre(coef)
    eps = 1e-9
    assert quantile_correlation(m, 0.5 - eps) == pytest.approx(quantile_correlation(m, 0.5 + eps), abs=1e-7)


def test_clipping_constant():
    m = CopulaModel.legendre([[0.2, 0.15], [0.1, 0.25]])
    x, w = gauss_on(0, 1, 400)
    grid = m.density_grid(x, x)
    assert grid.min() < 0
    val, z = clipped_density(m, 0.01, 0.99)
    assert z >= 1.0
    assert val >= 0
    # Legendre basis integrates on its own 200-node rule; compare with a finer one
    assert z == pytest.approx(float(w @ np.maximum(grid, 0) @ w), abs=1e-3)
    pos = CopulaModel.legendre([[0.05]])
    assert clipped_density(pos, 0.3, 0.6) == (pytest.approx(copula_density(pos, 0.3, 0.6)), pytest.approx(1.0))


@pytest.mark.parametrize("seed", range(10))
def test_granger_lin_half_of_autolpinfor_near_independence(seed):
    coef = np.random.default_rng(seed).standard_normal((4, 4))
    coef *= 0.05 / np.linalg.norm(coef)
    m = CopulaModel.legendre(coef)
    assert 1.9 <= auto_lpinfor(m) / granger_lin(m) <= 2.1


def test_gaussian_curve():
    np.testing.assert_allclose(gaussian_copula_curve(0.0, GRID99), np.minimum(GRID99, 1 - GRID99), atol=1e-10)
    np.testing.assert_allclose(gaussian_copula_curve(1.0, GRID99), 1.0, atol=1e-12)
    assert gaussian_copula_curve(0.5, 0.5) == pytest.approx(2 / 3, abs=1e-12)


@pytest.mark.parametrize("rho", [-0.7, -0.2, 0.3, 0.9])
@pytest.mark.parametrize("h", [-1.5, 0.0, 0.8])
def test_bivariate_normal_diagonal_matches_scipy(rho, h):
    ref = stats.multivariate_normal([0, 0], [[1, rho], [rho, 1]]).cdf([h, h])
    assert bivariate_normal_diagonal(h, rho) == pytest.approx(ref, abs=1e-6)
    assert bivariate_normal_diagonal(0.0, rho) == pytest.approx(0.25 + math.asin(rho) / (2 * math.pi), abs=1e-14)


def test_comonotone_cdf_gives_unit_curve():
    class Comonotone:
        def cdf(self, u, v):
            return np.minimum(u, v)

    from lptime import copula as cop_mod
    np.testing.assert_allclose(cop_mod.quantile_correlation(Comonotone(), GRID99), 1.0, atol=1e-14)


def test_invalid_probabilities_rejected():
    m = CopulaModel.legendre([[0.1]])
    for bad in (0.0, 1.0, -0.5):
        with pytest.raises(InvalidProbability):
            copula_density(m, bad, 0.5)
        with pytest.raises(InvalidProbability):
            quantile_correlation(m, bad)


def test_serial_copula_on_arch_has_volatility_term():
    s = lp_transform(arch1(8000, 9), 4)
    m = serial_copula(s, 1)
    assert m.coef[1, 1] > 0.1
    assert auto_lpinfor(m) > 0.01
    assert conditional_lpinfor(m, 0.02) > conditional_lpinfor(m, 0.5)
