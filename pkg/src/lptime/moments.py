"""LP moments, tail-index and orthogonal quantile reconstruction."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import NamedTuple, Optional

import numpy as np

from .basis import DEFAULT_K_MOMENTS, ScoreBasis, build_score_basis, lp_transform
from .empirical import MidDistribution, check_probability

TAIL_THRESHOLD = 0.95


@dataclass(frozen=True)
class LPMomentVector:
    """LP(j) for ``j = 1..k`` and their cumulative squared sums."""

    values: np.ndarray
    requested: int

    @property
    def k(self) -> int:
        return self.values.size

    @property
    def cumsum(self) -> np.ndarray:
        return np.cumsum(self.values**2)

    def __getitem__(self, j: int) -> float:
        """One-based access: ``m[1]`` is LP(1)."""
        return float(self.values[j - 1])


def lp_moments(sample, k_moments: int = DEFAULT_K_MOMENTS) -> LPMomentVector:
    """Empirical ``LP(j) = mean(Z(Y(t)) * YS_j(t))``."""
    series = lp_transform(sample, k_moments)
    vals = series.z @ series.matrix / series.T
    return LPMomentVector(vals, k_moments)


def lp_moments_from_distribution(dist: MidDistribution, basis: Optional[ScoreBasis] = None,
                                 k_moments: int = DEFAULT_K_MOMENTS) -> LPMomentVector:
    """LP moments of a discrete distribution given by values and masses."""
    if basis is None:
        basis = build_score_basis(dist, k_moments)
    z = (dist.distinct_values - dist.mean()) / dist.std()
    vals = basis.table @ (dist.masses * z)
    return LPMomentVector(vals, basis.requested_k)


def lp_moment_normal_first() -> float:
    """LP(1) of the standard normal, ``sqrt(3 / pi)``."""
    return math.sqrt(3.0 / math.pi)


class TailIndex(NamedTuple):
    index: int
    saturated: bool


def lp_tail_index(moments, threshold: float = TAIL_THRESHOLD) -> TailIndex:
    """Smallest j whose cumulative squared LP moments exceed ``threshold``.

    Returns ``k`` with ``saturated=True`` when the threshold is never crossed.
    """
    vals = moments.values if isinstance(moments, LPMomentVector) else np.asarray(moments, float)
    cum = np.cumsum(vals**2)
    hit = np.flatnonzero(cum > threshold)
    if hit.size == 0:
        return TailIndex(int(vals.size), True)
    return TailIndex(int(hit[0]) + 1, False)


def quantile_reconstruction(moments: LPMomentVector, basis, u, k: Optional[int] = None):
    """Partial sum ``sum_{j<=k} LP(j) S_j(u)`` approximating ``Q(u; Z(Y))``."""
    u_arr = check_probability(np.atleast_1d(u))
    k = min(moments.k, basis.k) if k is None else k
    out = moments.values[:k] @ basis.scores_at(u_arr)[:k]
    return float(out[0]) if np.ndim(u) == 0 else out


def reference_table() -> dict[str, list[float]]:
    text = resources.files("lptime").joinpath("data/table1.json").read_text()
    return json.loads(text)["moments"]


def nearest_reference(moments: LPMomentVector) -> tuple[str, float]:
    """Closest tabulated distribution by Euclidean distance over LP(1..4)."""
    first = np.zeros(4)
    n = min(4, moments.k)
    first[:n] = moments.values[:n]
    best = min(
        ((name, float(np.linalg.norm(first - np.asarray(ref)))) for name, ref in reference_table().items()),
        key=lambda item: item[1],
    )
    return best
