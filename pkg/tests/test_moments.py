import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lptime.basis import LegendreBasis, lp_transform
from lptime.empirical import empirical_mid_distribution, normalize
from lptime.moments import (
    LPMomentVector,
    lp_moment_normal_first,
    lp_moments,
    lp_moments_from_distribution,
    lp_tail_index,
    nearest_reference,
    quantile_reconstruction,
    reference_table,
)


def test_normal_first_moment_closed_form():
    # E[Z (2 sqrt3)(Phi(Z) - 1/2)] = 2 sqrt3 * E[phi(Z)] = 2 sqrt3 / (2 sqrt(pi))
    assert lp_moment_normal_first() == pytest.approx(math.sqrt(3 / math.pi), abs=1e-15)
    val, _ = __import__("scipy").integrate.quad(
        lambda z: z * 2 * math.sqrt(3) * (stats.norm.cdf(z) - 0.5) * stats.norm.pdf(z), -40, 40)
    assert val == pytest.approx(lp_moment_normal_first(), abs=1e-10)


def test_moments_are_projections_of_z():
    x = np.random.default_rng(3).gamma(2.0, size=2000)
    s = lp_transform(x, 6)
    m = lp_moments(x, 6)
    np.testing.assert_allclose(m.values, [np.mean(normalize(x) * s.column(j)) for j in range(1, 7)])
    assert m[1] == m.values[0]


@given(st.lists(st.integers(0, 6), min_size=4, max_size=60).filter(lambda xs: len(set(xs)) > 1))
@settings(max_examples=60)
def test_complete_basis_parseval(xs):
    d = empirical_mid_distribution(xs)
    m = lp_moments(xs, d.n_distinct - 1)
    assert np.sum(m.values**2) == pytest.approx(1.0, abs=1e-9)
    assert np.all(m.cumsum <= 1 + 1e-9)


def test_moments_affine_invariant():
    x = np.random.default_rng(4).exponential(size=500)
    np.testing.assert_allclose(lp_moments(x, 4).values, lp_moments(5 * x - 1, 4).values, atol=1e-12)
    np.testing.assert_allclose(lp_moments(x, 4).values[[0, 2]], lp_moments(-x, 4).values[[0, 2]], atol=1e-12)
    np.testing.assert_allclose(lp_moments(x, 4).values[[1, 3]], -lp_moments(-x, 4).values[[1, 3]], atol=1e-12)


def test_distribution_moments_match_sample_moments():
    xs = [1, 1, 2, 5, 5, 5, 9]
    a = lp_moments(xs, 3)
    b = lp_moments_from_distribution(empirical_mid_distribution(xs), k_moments=3)
    np.testing.assert_allclose(a.values, b.values, atol=1e-12)


def test_tail_index_examples():
    assert lp_tail_index([0.8, 0.6]) == (2, False)
    assert lp_tail_index([0.977, 0.0, 0.184, 0.0]) == (1, False)
    assert lp_tail_index([0.6, 0.6, 0.6]) == (3, False)
    assert lp_tail_index([0.98, 0.1]) == (1, False)
    assert lp_tail_index(np.full(5, 0.1)) == (5, True)
    # strict inequality at the threshold itself
    assert lp_tail_index([0.5, 0.0, 0.1], threshold=0.25).index == 3


def test_normal_sample_tail_index_one():
    x = np.random.default_rng(5).standard_normal(50_000)
    assert lp_tail_index(lp_moments(x, 8)).index == 1


def test_quantile_reconstruction_of_uniform():
    basis = LegendreBasis(4)
    m = LPMomentVector(np.array([1.0, 0, 0, 0]), 4)
    u = np.array([0.1, 0.5, 0.9])
    np.testing.assert_allclose(quantile_reconstruction(m, basis, u), math.sqrt(3) * (2 * u - 1))


def test_reference_table_and_nearest():
    table = reference_table()
    assert set(table) >= {"Uniform[0,1]", "N(0,1)", "Exp(1)", "Student t df=2", "Student t df=4"}
    x = np.random.default_rng(6).exponential(size=20_000)
    assert nearest_reference(lp_moments(x, 4))[0] == "Exp(1)"
    u = np.random.default_rng(7).uniform(size=20_000)
    assert nearest_reference(lp_moments(u, 4))[0] == "Uniform[0,1]"
