"""Multiple autoregressive model on selected LP components."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .basis import LPSeries, as_matrix
from .errors import InsufficientData, RankDeficient, UnstableModel

RESID_MAX_LAG = 20
RESID_PASS_FRACTION = 0.10


@dataclass(frozen=True)
class VarModel:
    """``X(t) = sum_{i=1}^m A_i X(t-i) + e(t)``, no intercept.

    ``coefs[i-1]`` is ``A_i`` (shape k' x k'); ``sigma`` the ML residual
    covariance of the selected order; ``bic_trace[m]`` the criterion for order
    m on the common estimation sample of size ``n_common``.
    """

    components: tuple
    coefs: np.ndarray
    sigma: np.ndarray
    bic_trace: np.ndarray
    sigma_trace: tuple
    n_common: int
    residuals: np.ndarray

    @property
    def order(self) -> int:
        return self.coefs.shape[0]

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    def companion(self) -> np.ndarray:
        k, m = self.dim, self.order
        comp = np.zeros((k * m, k * m))
        comp[:k] = np.hstack(list(self.coefs))
        comp[k:, :-k] = np.eye(k * (m - 1))
        return comp

    def spectral_radius(self) -> float:
        if self.order == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(self.companion()))))

    @property
    def stable(self) -> bool:
        return self.spectral_radius() < 1.0


def bic_value(sigma: np.ndarray, order: int, dim: int, n: int) -> float:
    """``log|Sigma| + m k'^2 log(n) / n``."""
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        return math.inf
    return float(logdet + order * dim * dim * math.log(n) / n)


def _lagged(x: np.ndarray, order: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    """Targets ``x[start:]`` and regressors ``[x(t-1), ..., x(t-order)]``."""
    T = x.shape[0]
    y = x[start:]
    if order == 0:
        return y, np.empty((T - start, 0))
    design = np.hstack([x[start - i:T - i] for i in range(1, order + 1)])
    return y, design


def _ls(y: np.ndarray, design: np.ndarray):
    if design.shape[1] == 0:
        return np.empty((0, y.shape[1])), y
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise RankDeficient(f"regressor matrix has rank {rank} < {design.shape[1]}")
    return beta, y - design @ beta


def _select(series, components: Optional[Sequence[int]]):
    x = as_matrix(series)
    if components is None:
        components = tuple(range(1, x.shape[1] + 1))
    components = tuple(int(c) for c in components)
    if not components or min(components) < 1 or max(components) > x.shape[1]:
        raise ValueError(f"components must be drawn from 1..{x.shape[1]}")
    return x[:, [c - 1 for c in components]], components


def fit_var(series, components: Optional[Sequence[int]] = None, max_order: int = 12,
            order: Optional[int] = None) -> VarModel:
    """Least-squares fit per order 0..max_order and BIC selection.

    All orders are compared on the common sample ``t > max_order``; the
    chosen order (or ``order`` when given) is then refit on every usable row.
    """
    x, components = _select(series, components)
    T, k = x.shape
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    if T <= k * max(max_order, 1) * 10:
        raise InsufficientData(f"T={T} too short for {k} components at order {max_order}")
    n = T - max_order
    bic, sigmas = [], []
    for m in range(max_order + 1):
        y, design = _lagged(x, m, max_order)
        _, resid = _ls(y, design)
        sig = resid.T @ resid / n
        sigmas.append(sig)
        bic.append(bic_value(sig, m, k, n))
    bic = np.asarray(bic)
    chosen = int(np.argmin(bic)) if order is None else int(order)

    y, design = _lagged(x, chosen, chosen)
    beta, resid = _ls(y, design)
    coefs = beta.T.reshape(k, chosen, k).transpose(1, 0, 2) if chosen else np.empty((0, k, k))
    sigma = resid.T @ resid / resid.shape[0]
    return VarModel(components, np.ascontiguousarray(coefs), sigma, bic, tuple(sigmas), n, resid)


def forecast(model: VarModel, history, steps: int = 1) -> np.ndarray:
    """Iterated predictions with zero innovations; shape ``(steps, k')``."""
    if not model.stable:
        raise UnstableModel(f"spectral radius {model.spectral_radius():.4f} >= 1")
    if isinstance(history, LPSeries):
        hist, _ = _select(history, model.components)
    else:
        hist = as_matrix(history)
        if hist.shape[1] != model.dim:
            hist, _ = _select(hist, model.components)
    m = model.order
    if hist.shape[0] < m:
        raise InsufficientData(f"need at least {m} past observations")
    if m == 0:
        return np.zeros((steps, model.dim))
    buf = list(hist[-m:])
    out = []
    for _ in range(steps):
        nxt = sum(model.coefs[i] @ buf[-1 - i] for i in range(m))
        out.append(nxt)
        buf.append(nxt)
    return np.vstack(out)


@dataclass(frozen=True)
class ResidualReport:
    acf: np.ndarray  # (k', max_lag)
    band: float
    fraction_outside: float
    passed: bool


def residual_acf(resid: np.ndarray, max_lag: int = RESID_MAX_LAG) -> np.ndarray:
    r = resid - resid.mean(axis=0)
    n = r.shape[0]
    var = np.einsum("tj,tj->j", r, r) / n
    out = np.empty((r.shape[1], max_lag))
    for h in range(1, max_lag + 1):
        out[:, h - 1] = np.einsum("tj,tj->j", r[:-h], r[h:]) / n / var
    return out


def residual_diagnostics(model: VarModel, series=None, max_lag: int = RESID_MAX_LAG) -> ResidualReport:
    """Share of residual autocorrelations outside the 95% white-noise band."""
    if series is None:
        resid = model.residuals
    else:
        x, _ = _select(series, model.components)
        y, design = _lagged(x, model.order, model.order)
        resid = y - design @ _stack_coefs(model) if model.order else y
    acf = residual_acf(resid, max_lag)
    band = 1.96 / math.sqrt(resid.shape[0])
    frac = float(np.mean(np.abs(acf) > band))
    return ResidualReport(acf, band, frac, frac <= RESID_PASS_FRACTION)


def _stack_coefs(model: VarModel) -> np.ndarray:
    """Regression matrix matching the ``_lagged`` design: rows lag-major."""
    return np.hstack(list(model.coefs)).T
