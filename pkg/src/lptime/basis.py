"""Data-adaptive orthonormal score functions and the LP-transformed series.

The first score is the standardized mid-rank; higher scores are polynomials
in it, orthonormalized under the sample masses. For untied data they converge
to the shifted orthonormal Legendre polynomials on (0, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg

from .empirical import (
    MidDistribution,
    as_sample,
    check_probability,
    mid_distribution,
    normalize,
)
from .errors import DegenerateDistribution

DEFAULT_K = 4
DEFAULT_K_MOMENTS = 20
PIVOT_TOL = 1e-12


# ---------------------------------------------------------------------------
# Legendre reference basis


def legendre_score(j: int, u):
    """Shifted orthonormal Legendre polynomial ``sqrt(2j+1) P_j(2u - 1)``.

    ``Leg_1(u) = sqrt(12) (u - 1/2)``; every ``Leg_j`` with ``j >= 1`` has zero
    mean and unit second moment on (0, 1).
    """
    if j < 0:
        raise ValueError("degree must be nonnegative")
    c = np.zeros(j + 1)
    c[j] = math.sqrt(2 * j + 1)
    out = npleg.legval(2.0 * np.asarray(u, dtype=float) - 1.0, c)
    return float(out) if np.ndim(u) == 0 else out


def legendre_antiderivative(j: int, u):
    """``int_0^u Leg_j(s) ds``."""
    c = np.zeros(j + 1)
    c[j] = math.sqrt(2 * j + 1)
    # d/du of P(2u-1) picks up a factor 2, so the integral in x is halved
    ci = npleg.legint(c, lbnd=-1.0) / 2.0
    out = npleg.legval(2.0 * np.asarray(u, dtype=float) - 1.0, ci)
    return float(out) if np.ndim(u) == 0 else out


@lru_cache(maxsize=16)
def _gauss_unit(n: int):
    x, w = npleg.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@dataclass(frozen=True)
class LegendreBasis:
    """Continuous-case score basis: ``S_j = Leg_j`` on (0, 1).

    Used for closed-form reference checks of copula quantities.
    ``n_quad`` Gauss nodes integrate polynomials of degree ``< 2 n_quad``
    exactly.
    """

    k: int
    n_quad: int = 200

    def scores_at(self, u) -> np.ndarray:
        u = check_probability(np.atleast_1d(u))
        return np.vstack([legendre_score(j, u) for j in range(1, self.k + 1)])

    def antiderivative(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return np.vstack([legendre_antiderivative(j, u) for j in range(1, self.k + 1)])

    def quadrature(self):
        nodes, weights = _gauss_unit(self.n_quad)
        return nodes, weights, self.scores_at(nodes)


# ---------------------------------------------------------------------------
# Empirical score basis


@dataclass(frozen=True)
class ScoreBasis:
    """Orthonormal score functions ``T_1..T_k`` on the distinct sample values.

    Attributes
    ----------
    dist : MidDistribution
        Source distribution; supplies the masses that define the inner product.
    table : ndarray, shape (k, n_distinct)
        ``table[j-1, i]`` is ``T_j`` at the ``i``-th distinct value.
    coef : ndarray, shape (k, k + 1)
        ``T_j = sum_p coef[j-1, p] * T_1**p``.
    requested_k : int
        The k asked for; ``k < requested_k`` when the basis was capped.
    """

    dist: MidDistribution
    table: np.ndarray
    coef: np.ndarray
    requested_k: int

    @property
    def k(self) -> int:
        return self.table.shape[0]

    @property
    def capped(self) -> bool:
        return self.k < self.requested_k

    @property
    def support(self) -> np.ndarray:
        """Mid-rank points of the distinct values."""
        return self.dist.middist

    def scores_at(self, u) -> np.ndarray:
        """``S_j(u)`` for ``j = 1..k``; piecewise constant on quantile cells."""
        return self.table[:, self.dist.cell_of(np.atleast_1d(u))]

    def antiderivative(self, u) -> np.ndarray:
        """``int_0^u S_j(s) ds``, exact (piecewise linear in u)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        edges = self.dist.cell_edges
        cum = np.concatenate(
            (np.zeros((self.k, 1)), np.cumsum(self.table * self.dist.masses, axis=1)), axis=1
        )
        inner = (u > 0) & (u < 1)
        idx = np.zeros(u.shape, dtype=int)
        idx[inner] = self.dist.cell_of(u[inner])
        idx[u >= 1] = self.dist.n_distinct - 1
        out = cum[:, idx] + (np.clip(u, 0, 1) - edges[idx]) * self.table[:, idx]
        out[:, u <= 0] = 0.0
        return out

    def quadrature(self):
        """Cell midpoints (mid-ranks), cell widths and score values.

        Integrals of any function of the scores are exact as weighted sums.
        """
        return self.dist.middist, self.dist.masses, self.table

    def eval_score(self, j: int, u):
        if not 1 <= j <= self.k:
            raise ValueError(f"score index {j} outside 1..{self.k}")
        out = self.table[j - 1, self.dist.cell_of(u)]
        return float(out) if np.ndim(u) == 0 else out


def _inner(w, a, b):
    return float(np.dot(w, a * b))


def build_score_basis(dist: MidDistribution, k: int = DEFAULT_K) -> ScoreBasis:
    """Gram-Schmidt orthonormal polynomials in the standardized mid-rank.

    The Krylov sequence ``T_1 * T_{j-1}`` spans the same space as the powers
    ``1, T_1, ..., T_1**j`` and is far better conditioned; each new vector
    is orthogonalized against all previous ones twice (modified Gram-Schmidt
    plus one re-orthogonalization pass). ``k`` is capped at
    ``n_distinct - 1`` and at the last vector whose relative pivot exceeds
    ``PIVOT_TOL``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if dist.n_distinct < 2:
        raise DegenerateDistribution("need at least two distinct values")
    w = dist.masses
    x = dist.middist
    sd = math.sqrt(_inner(w, x - 0.5, x - 0.5))
    if not sd > 0:
        raise DegenerateDistribution("mid-ranks have no spread")
    t1 = (x - 0.5) / sd
    kmax = min(k, dist.n_distinct - 1)

    ones = np.ones_like(x)
    basis = [ones]
    coefs = [np.eye(1, kmax + 1, 0)[0]]

    # T_1 is centred and scaled already; it still goes through the same
    # orthogonalization so all columns share one rounding profile
    v, c = t1.copy(), np.eye(1, kmax + 1, 1)[0]
    for j in range(1, kmax + 1):
        if j > 1:
            v = t1 * basis[-1]
            c = np.roll(coefs[-1], 1)  # multiply polynomial by T_1
        norm0 = math.sqrt(_inner(w, v, v))
        for _ in range(2):
            for b, cb in zip(basis, coefs):
                r = _inner(w, v, b)
                v = v - r * b
                c = c - r * cb
        norm = math.sqrt(_inner(w, v, v))
        if norm0 == 0 or norm / norm0 < PIVOT_TOL:
            break
        basis.append(v / norm)
        coefs.append(c / norm)

    table = np.vstack(basis[1:]) if len(basis) > 1 else np.empty((0, x.size))
    if table.shape[0] == 0:
        raise DegenerateDistribution("no non-constant score function could be built")
    coef = np.vstack(coefs[1:])
    return ScoreBasis(dist, table, coef, requested_k=k)


def eval_score(basis: ScoreBasis, j: int, u):
    return basis.eval_score(j, u)


# ---------------------------------------------------------------------------
# LP-transformed series


@dataclass(frozen=True)
class LPSeries:
    """T x k matrix ``YS[t, j-1] = T_j(Y(t))`` plus the normalized series Z."""

    matrix: np.ndarray
    basis: ScoreBasis
    z: np.ndarray
    values: np.ndarray

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    @property
    def T(self) -> int:
        return self.matrix.shape[0]

    @property
    def dist(self) -> MidDistribution:
        return self.basis.dist

    @property
    def capped(self) -> bool:
        return self.basis.capped

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j - 1]

    def mid_ranks(self) -> np.ndarray:
        return self.dist.middist[self.dist.inverse]


def lp_transform(sample, k: int = DEFAULT_K) -> LPSeries:
    sample = as_sample(sample)
    dist = mid_distribution(sample.values)
    basis = build_score_basis(dist, k)
    matrix = basis.table[:, dist.inverse].T.copy()
    z = normalize(sample)
    for arr in (matrix, z):
        arr.flags.writeable = False
    return LPSeries(matrix, basis, z, sample.values)


def as_matrix(series) -> np.ndarray:
    """Coerce an LPSeries or raw 1-D/2-D array to a float matrix."""
    if isinstance(series, LPSeries):
        return np.asarray(series.matrix, dtype=float)
    arr = np.asarray(series, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr
