"""Lag-h LP-comoment matrices, BIC smoothing and derived statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .basis import DEFAULT_K, LPSeries, as_matrix, build_score_basis, legendre_score, lp_transform
from .empirical import mid_distribution
from .errors import InsufficientOverlap
from .moments import LPMomentVector, lp_moments_from_distribution

MIN_OVERLAP = 10
TIME_LAG = "time"


@dataclass(frozen=True)
class ComomentMatrix:
    """LP-comoments ``E[YS_j(t) YS_m(t+h)]``; rows index the earlier variable.

    ``smooth``, ``mask`` and ``bic_path`` are ``None`` until :func:`bic_smooth`
    has been applied.
    """

    lag: Union[int, str]
    raw: np.ndarray
    n: int
    smooth: Optional[np.ndarray] = None
    mask: Optional[np.ndarray] = None
    bic_path: Optional[np.ndarray] = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.raw.shape

    @property
    def is_smoothed(self) -> bool:
        return self.smooth is not None

    def values(self, use_smooth: bool = True) -> np.ndarray:
        if use_smooth:
            if self.smooth is None:
                raise ValueError("matrix has not been smoothed; call bic_smooth first")
            return self.smooth
        return self.raw


def _check_overlap(T: int, h: int) -> None:
    if h < 1:
        raise ValueError("lag must be at least 1")
    if T - h < MIN_OVERLAP:
        raise InsufficientOverlap(f"lag {h} leaves {T - h} overlapping points (< {MIN_OVERLAP})")


def lp_comoment_matrix(series, h: int) -> ComomentMatrix:
    """Raw lag-h comoment matrix with overlap normalization ``1/(T-h)``.

    Columns are not re-centred over the overlap window; they already have
    exact zero mean over the full sample.
    """
    x = as_matrix(series)
    T = x.shape[0]
    _check_overlap(T, h)
    n = T - h
    raw = x[:-h].T @ x[h:] / n
    return ComomentMatrix(h, raw, n)


def bic_path(raw: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Entry order and penalized cumulative sums ``sum c^2 - 2 m log(n) / n``.

    ``path[m]`` is the criterion with the top ``m`` entries retained
    (``path[0] == 0``). Ties in squared magnitude keep row-major order.
    """
    sq = raw.ravel() ** 2
    order = np.argsort(-sq, kind="stable")
    m = np.arange(sq.size + 1)
    path = np.concatenate(([0.0], np.cumsum(sq[order]))) - 2.0 * m * math.log(n) / n
    return order, path


def bic_smooth(matrix: ComomentMatrix) -> ComomentMatrix:
    """Keep the top-m* entries maximizing the penalized cumulative sum."""
    order, path = bic_path(matrix.raw, matrix.n)
    m_star = int(np.argmax(path))  # first maximizer, so ties favour fewer terms
    mask = np.zeros(matrix.raw.size, dtype=bool)
    mask[order[:m_star]] = True
    mask = mask.reshape(matrix.raw.shape)
    smooth = np.where(mask, matrix.raw, 0.0)
    return replace(matrix, smooth=smooth, mask=mask, bic_path=path)


def comoment(series, h: int, smooth: bool = True) -> ComomentMatrix:
    mat = lp_comoment_matrix(series, h)
    return bic_smooth(mat) if smooth else mat


def lp_autocorrelation(mom_a, mom_b, matrix: ComomentMatrix, use_smooth: bool = True) -> float:
    """Pearson autocorrelation as the quadratic form ``LP_a' C LP_b``."""
    a = mom_a.values if isinstance(mom_a, LPMomentVector) else np.asarray(mom_a, float)
    b = mom_b.values if isinstance(mom_b, LPMomentVector) else np.asarray(mom_b, float)
    c = matrix.values(use_smooth) if isinstance(matrix, ComomentMatrix) else np.asarray(matrix, float)
    if c.shape != (a.size, b.size):
        raise ValueError(f"moment lengths {a.size}, {b.size} do not match matrix shape {c.shape}")
    return float(a @ c @ b)


@dataclass(frozen=True)
class Correlogram:
    """``table[j-1, h-1]`` is the lag-h autocorrelation of ``YS_j``."""

    table: np.ndarray
    lags: np.ndarray
    band: float

    def outside_band(self) -> np.ndarray:
        return np.abs(self.table) > self.band


def lp_correlogram(series, max_lag: int) -> Correlogram:
    x = as_matrix(series)
    T = x.shape[0]
    if max_lag < 1 or max_lag >= T / 4:
        raise InsufficientOverlap(f"max_lag must satisfy 1 <= max_lag < T/4 = {T / 4:g}")
    table = np.empty((x.shape[1], max_lag))
    for h in range(1, max_lag + 1):
        table[:, h - 1] = np.einsum("tj,tj->j", x[:-h], x[h:]) / (T - h)
    return Correlogram(table, np.arange(1, max_lag + 1), 1.96 / math.sqrt(T))


def nonstationarity_comoment(sample, k: int = DEFAULT_K) -> ComomentMatrix:
    """Comoments of Legendre scores of the time index (rows) with ``YS`` (columns)."""
    series = sample if isinstance(sample, LPSeries) else lp_transform(sample, k)
    T, kk = series.matrix.shape
    u = (np.arange(1, T + 1) - 0.5) / T
    time_scores = np.vstack([legendre_score(j, u) for j in range(1, kk + 1)])
    raw = time_scores @ series.matrix / T
    return ComomentMatrix(TIME_LAG, raw, T)


def lpinfor_stat(matrix: ComomentMatrix, use_smooth: bool = True) -> float:
    """Sum of squared comoments (selected entries only when ``use_smooth``)."""
    return float(np.sum(matrix.values(use_smooth) ** 2))


def comoment_from_pmf(x_values, y_values, pmf, k: Optional[int] = None):
    """Exact comoments and LP moments of a finite joint pmf.

    Returns ``(matrix, moments_x, moments_y)``. With ``k=None`` each margin
    gets its complete basis (``n_distinct - 1`` functions).
    """
    pmf = np.asarray(pmf, dtype=float)
    pmf = pmf / pmf.sum()
    x_values = np.asarray(x_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)
    dx = mid_distribution(x_values, pmf.sum(axis=1))
    dy = mid_distribution(y_values, pmf.sum(axis=0))
    bx = build_score_basis(dx, k or dx.n_distinct - 1)
    by = build_score_basis(dy, k or dy.n_distinct - 1)
    # map the supplied support onto the sorted distinct values; zero-mass
    # points land on an arbitrary cell, which is harmless
    ix = np.minimum(np.searchsorted(dx.distinct_values, x_values), dx.n_distinct - 1)
    iy = np.minimum(np.searchsorted(dy.distinct_values, y_values), dy.n_distinct - 1)
    tx = bx.table[:, ix]
    ty = by.table[:, iy]
    raw = tx @ pmf @ ty.T
    return ComomentMatrix(0, raw, 0), lp_moments_from_distribution(dx, bx), lp_moments_from_distribution(dy, by)
