"""Empirical distribution machinery: mid-distribution, quantiles, QIQ.

All variances use the population divisor (T, or the probability masses for
weighted distributions) so that the score functions built on top of these
objects are exactly orthonormal under the empirical measure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DegenerateDistribution, InvalidProbability

ArrayLike = Union[np.ndarray, list, tuple]


@dataclass(frozen=True)
class SeriesSample:
    """Ordered observations of one univariate series.

    Parameters
    ----------
    values : array_like
        Observations in time order. Length must be at least 2 and every value
        finite.
    time_index : array_like, optional
        Labels for the observations (dates, integers). Defaults to 1..T.
    """

    values: np.ndarray
    time_index: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("series must be one-dimensional")
        if values.size < 2:
            raise ValueError("series needs at least 2 observations")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains NaN or infinite values")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if self.time_index is None:
            idx = np.arange(1, values.size + 1)
        else:
            idx = np.asarray(self.time_index)
            if idx.shape != values.shape:
                raise ValueError("time_index length does not match values")
        object.__setattr__(self, "time_index", idx)

    def __len__(self) -> int:
        return self.values.size


def as_sample(data) -> SeriesSample:
    if isinstance(data, SeriesSample):
        return data
    return SeriesSample(np.asarray(data, dtype=float))


@dataclass(frozen=True)
class MidDistribution:
    """Discrete distribution on sorted distinct values with mid-distribution.

    ``middist[i] = cdf[i] - masses[i] / 2``.
    """

    distinct_values: np.ndarray
    masses: np.ndarray
    cdf: np.ndarray
    middist: np.ndarray
    inverse: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_distinct(self) -> int:
        return self.distinct_values.size

    @property
    def cell_edges(self) -> np.ndarray:
        """Boundaries ``0 = c_0 < c_1 < ... < c_n = 1`` of the quantile cells."""
        return np.concatenate(([0.0], self.cdf))

    def mean(self) -> float:
        return float(np.dot(self.masses, self.distinct_values))

    def std(self) -> float:
        mu = self.mean()
        return float(np.sqrt(np.dot(self.masses, (self.distinct_values - mu) ** 2)))

    def cell_of(self, u) -> np.ndarray:
        """Index of the distinct value ``Q(u)`` for each probability ``u``."""
        u = check_probability(u)
        idx = np.searchsorted(self.cdf, u, side="left")
        return np.minimum(idx, self.n_distinct - 1)

    def quantile(self, u):
        u_arr = np.asarray(u, dtype=float)
        q = self.distinct_values[self.cell_of(u_arr)]
        return float(q) if np.ndim(u) == 0 else q


def check_probability(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u <= 0.0) or np.any(u >= 1.0):
        raise InvalidProbability("probabilities must lie strictly inside (0, 1)")
    return u


def mid_distribution(values: ArrayLike, weights: Optional[ArrayLike] = None) -> MidDistribution:
    """Mid-distribution of a (possibly weighted) set of values.

    With ``weights=None`` each observation gets mass 1/T; ties pool their
    mass on one distinct value.
    """
    values = np.asarray(values, dtype=float)
    if weights is None:
        distinct, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
        masses = counts / values.size
        cdf = np.cumsum(counts) / values.size
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != values.shape or np.any(w < 0):
            raise ValueError("weights must be nonnegative and match values")
        keep = w > 0
        distinct, inv = np.unique(values[keep], return_inverse=True)
        masses = np.bincount(inv, weights=w[keep]) / w[keep].sum()
        cdf = np.cumsum(masses)
        inverse = None
    if distinct.size < 2:
        raise DegenerateDistribution("sample has a single distinct value")
    cdf[-1] = 1.0
    middist = cdf - masses / 2.0
    return MidDistribution(distinct, masses, cdf, middist, inverse if weights is None else None)


def empirical_mid_distribution(sample) -> MidDistribution:
    return mid_distribution(as_sample(sample).values)


def mid_rank_series(sample) -> np.ndarray:
    """Mid-distribution value of each observation, in observation order."""
    dist = empirical_mid_distribution(sample)
    return dist.middist[dist.inverse]


def empirical_quantile(sample, u):
    """Left-continuous inverse of the empirical CDF (no interpolation)."""
    dist = empirical_mid_distribution(sample)
    return dist.quantile(u)


def normalize(sample) -> np.ndarray:
    """Standardize to mean 0 and population variance 1."""
    x = as_sample(sample).values
    sd = x.std()
    if not sd > 0 or sd <= 1e-14 * max(1.0, float(np.abs(x).max())):
        raise DegenerateDistribution("series has zero variance")
    return (x - x.mean()) / sd


@dataclass(frozen=True)
class QiqCurve:
    grid: np.ndarray
    qiq: np.ndarray
    mq: float
    dq: float


def qiq_curve(sample, grid: ArrayLike) -> QiqCurve:
    """Informative quantile function ``(Q(u) - MQ) / DQ`` on ``grid``.

    ``MQ = (Q(.25) + Q(.75)) / 2`` and ``DQ = 2 (Q(.75) - Q(.25))``.
    """
    dist = sample if isinstance(sample, MidDistribution) else empirical_mid_distribution(sample)
    grid = check_probability(np.atleast_1d(np.asarray(grid, dtype=float)))
    q1, q3 = dist.quantile(0.25), dist.quantile(0.75)
    if q3 == q1:
        raise DegenerateDistribution("upper and lower quartiles coincide")
    mq = 0.5 * (q1 + q3)
    dq = 2.0 * (q3 - q1)
    return QiqCurve(grid, (dist.quantile(grid) - mq) / dq, float(mq), float(dq))
