"""Nonparametric time series analysis on orthonormal mid-rank score series."""

__version__ = "0.1.0"

from .basis import LegendreBasis, LPSeries, ScoreBasis, build_score_basis, legendre_score, lp_transform
from .comoment import ComomentMatrix, bic_smooth, lp_comoment_matrix, lp_correlogram
from .copula import CopulaModel
from .empirical import MidDistribution, SeriesSample, empirical_mid_distribution, mid_rank_series
from .moments import LPMomentVector, lp_moments, lp_tail_index

__all__ = [
    "ComomentMatrix",
    "CopulaModel",
    "LPMomentVector",
    "LPSeries",
    "LegendreBasis",
    "MidDistribution",
    "ScoreBasis",
    "SeriesSample",
    "bic_smooth",
    "build_score_basis",
    "empirical_mid_distribution",
    "legendre_score",
    "lp_comoment_matrix",
    "lp_correlogram",
    "lp_moments",
    "lp_tail_index",
    "lp_transform",
    "mid_rank_series",
]
