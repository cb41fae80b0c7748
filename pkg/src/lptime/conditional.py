"""Conditional distributions of Y(t+h) given Y(t) = Q(u).

The conditional law is the empirical marginal reweighted by the clipped
copula slice at ``u`` (skew-G form). Draws come from accept-reject with
uniform resampling of the observed sample as proposal, so quantile curves
computed from them never cross.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .basis import ScoreBasis
from .copula import CopulaModel
from .empirical import QiqCurve, as_sample, check_probability, qiq_curve
from .errors import DegenerateCopula, ExtremeLevelUnstable

DEFAULT_NSIM = 10_000
DEFAULT_LEVELS = (0.001, 0.25, 0.5, 0.75, 0.999)


def _empirical_col_basis(model: CopulaModel) -> ScoreBasis:
    basis = model.col_basis
    if not isinstance(basis, ScoreBasis):
        raise TypeError("conditional simulation needs an empirical score basis")
    return basis


def slice_weights(model: CopulaModel, u: float) -> np.ndarray:
    """Clipped comparison density ``max(d(v_i; u), 0)`` on each distinct value."""
    basis = _empirical_col_basis(model)
    beta = model.slice_coefficients(u)[0]
    return np.maximum(1.0 + beta @ basis.table, 0.0)


def conditional_pmf(model: CopulaModel, u: float) -> tuple[np.ndarray, np.ndarray]:
    """Support and probabilities of the skew-G conditional distribution."""
    basis = _empirical_col_basis(model)
    dist = basis.dist
    w = dist.masses * slice_weights(model, u)
    total = w.sum()
    if not total > 0:
        raise DegenerateCopula(f"copula slice at u={u:g} has no mass after clipping")
    return dist.distinct_values, w / total


def skew_g_density(sample, model: CopulaModel, u: float, y):
    """Conditional mass at ``y``; zero off the sample support."""
    values, probs = conditional_pmf(model, u)
    if sample is not None:
        support = np.unique(as_sample(sample).values)
        if support.shape != values.shape or not np.array_equal(support, values):
            raise ValueError("sample and copula model were built from different data")
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    idx = np.minimum(np.searchsorted(values, y_arr), values.size - 1)
    out = np.where(values[idx] == y_arr, probs[idx], 0.0)
    return float(out[0]) if np.ndim(y) == 0 else out


@dataclass(frozen=True)
class ConditionalSample:
    u: float
    draws: np.ndarray
    seed: int
    acceptance_rate: float
    n_proposed: int

    @property
    def n_sim(self) -> int:
        return self.draws.size


def _materialize_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return int(seed)


def sample_conditional(sample, model: CopulaModel, u: float, n_sim: int = DEFAULT_NSIM,
                       seed: Optional[int] = None) -> ConditionalSample:
    """Accept-reject draws from the conditional distribution at quantile ``u``.

    Proposals resample observations uniformly; a proposal on distinct value
    ``i`` is accepted with probability ``d_i / max(d)``.
    """
    check_probability(u)
    basis = _empirical_col_basis(model)
    dist = basis.dist
    obs = as_sample(sample).values if sample is not None else None
    d = slice_weights(model, u)
    top = d.max()
    if not top > 0:
        raise DegenerateCopula(f"copula slice at u={u:g} has no mass after clipping")
    accept_prob = d / top
    seed = _materialize_seed(seed)
    rng = np.random.Generator(np.random.PCG64(seed))

    if obs is not None:
        cell = np.searchsorted(dist.distinct_values, obs)
        if not np.array_equal(dist.distinct_values[np.minimum(cell, dist.n_distinct - 1)], obs):
            raise ValueError("sample and copula model were built from different data")
    else:
        cell = dist.inverse

    expected_rate = float(dist.masses @ accept_prob)
    kept: list[np.ndarray] = []
    n_kept = n_proposed = 0
    while n_kept < n_sim:
        batch = int(math.ceil(1.1 * (n_sim - n_kept) / expected_rate)) + 16
        idx = cell[rng.integers(0, cell.size, size=batch)]
        ok = rng.random(batch) < accept_prob[idx]
        accepted = idx[ok]
        need = n_sim - n_kept
        if accepted.size > need:
            # count proposals only up to the one that completed the sample
            last = np.flatnonzero(ok)[need - 1]
            n_proposed += last + 1
            accepted = accepted[:need]
        else:
            n_proposed += batch
        kept.append(accepted)
        n_kept += accepted.size
    draws = dist.distinct_values[np.concatenate(kept)]
    draws.flags.writeable = False
    return ConditionalSample(float(u), draws, seed, n_sim / n_proposed, n_proposed)


@dataclass(frozen=True)
class ConditionalQuantiles:
    levels: np.ndarray
    values: np.ndarray
    extreme: np.ndarray  # True where level < 1/n_sim


def conditional_quantiles(cond: ConditionalSample, levels: Sequence[float] = DEFAULT_LEVELS
                          ) -> ConditionalQuantiles:
    """Empirical quantiles of the draws (left-continuous inverse)."""
    levels = check_probability(np.atleast_1d(np.asarray(levels, dtype=float)))
    if np.any(np.diff(levels) < 0):
        raise ValueError("levels must be sorted ascending")
    extreme = levels < 1.0 / cond.n_sim
    if extreme.any():
        warnings.warn(
            f"levels {levels[extreme].tolist()} are below 1/n_sim = {1.0 / cond.n_sim:g}",
            ExtremeLevelUnstable,
            stacklevel=2,
        )
    values = np.quantile(cond.draws, levels, method="inverted_cdf")
    return ConditionalQuantiles(levels, values, extreme)


def conditional_qiq(cond: ConditionalSample, grid) -> QiqCurve:
    return qiq_curve(cond.draws, grid)


@dataclass(frozen=True)
class QuantileCurves:
    u_grid: np.ndarray
    levels: np.ndarray
    values: np.ndarray  # shape (len(u_grid), len(levels))
    acceptance: np.ndarray
    seed: int
    samples: tuple


def conditional_quantile_curves(sample, model: CopulaModel, u_grid, levels=DEFAULT_LEVELS,
                                n_sim: int = DEFAULT_NSIM, seed: Optional[int] = None) -> QuantileCurves:
    """Conditional quantiles over a grid of conditioning levels.

    Each ``u`` gets an independent child seed spawned from ``seed``.
    """
    u_grid = check_probability(np.atleast_1d(np.asarray(u_grid, dtype=float)))
    levels = np.asarray(levels, dtype=float)
    seed = _materialize_seed(seed)
    children = np.random.SeedSequence(seed).spawn(u_grid.size)
    rows, rates, samples = [], [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtremeLevelUnstable)
        for u, child in zip(u_grid, children):
            child_seed = int(child.generate_state(1, np.uint64)[0] % (2**63))
            cond = sample_conditional(sample, model, float(u), n_sim, child_seed)
            rows.append(conditional_quantiles(cond, levels).values)
            rates.append(cond.acceptance_rate)
            samples.append(cond)
    return QuantileCurves(u_grid, levels, np.vstack(rows), np.asarray(rates), seed, tuple(samples))
