"""Burg autoregressive fitting, order selection and spectral densities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .basis import LPSeries
from .copula import CopulaModel
from .errors import InsufficientData, UnstableModel

DEFAULT_GRID = 512
DEFAULT_H = 50


@dataclass(frozen=True)
class ArFit:
    """Burg fit for orders 0..max_order.

    ``coefs[m]`` holds ``a(1;m)..a(m;m)`` for the model
    ``Y(t) = sum_k a(k;m) Y(t-k) + e(t)``; ``sigma2[m]`` its innovation
    variance and ``reflection[m-1]`` the m-th reflection coefficient.
    """

    coefs: tuple
    sigma2: np.ndarray
    reflection: np.ndarray
    n: int
    mean: float
    order: int

    @property
    def max_order(self) -> int:
        return self.sigma2.size - 1

    @property
    def ar(self) -> np.ndarray:
        return self.coefs[self.order]

    @property
    def innovation_variance(self) -> float:
        return float(self.sigma2[self.order])

    def with_order(self, order: int) -> "ArFit":
        if not 0 <= order <= self.max_order:
            raise ValueError(f"order {order} outside 0..{self.max_order}")
        return ArFit(self.coefs, self.sigma2, self.reflection, self.n, self.mean, order)


def burg_fit(series, max_order: int, demean: bool = True) -> ArFit:
    """Burg recursion on forward and backward prediction errors.

    The selected order of the returned fit is ``max_order``; use
    :func:`select_order` to choose one by AIC/BIC.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    if n <= 2 * max_order or n < 2:
        raise InsufficientData(f"series of length {n} too short for order {max_order}")
    mu = float(x.mean()) if demean else 0.0
    x = x - mu
    sig = float(np.dot(x, x) / n)
    sigma2 = [sig]
    coefs = [np.zeros(0)]
    refl = []
    # a holds the prediction-error filter 1, a1, ..., am (sign convention e = x + sum a x_lag)
    a = np.ones(1)
    f = x[1:].copy()   # forward errors e_f(t),  t = m..n-1
    b = x[:-1].copy()  # backward errors e_b(t-1)
    for m in range(1, max_order + 1):
        den = np.dot(f, f) + np.dot(b, b)
        k = -2.0 * np.dot(f, b) / den if den > 0 else 0.0
        refl.append(k)
        a_ext = np.concatenate((a, [0.0]))
        a = a_ext + k * a_ext[::-1]
        sig *= 1.0 - k * k
        sigma2.append(sig)
        coefs.append(-a[1:].copy())
        f, b = (f + k * b)[1:], (b + k * f)[:-1]
    return ArFit(tuple(coefs), np.asarray(sigma2), np.asarray(refl), n, mu, max_order)


def order_criteria(fit: ArFit, criterion: str = "bic", n: Optional[int] = None) -> np.ndarray:
    """``log sigma2_m + c m / n`` with ``c = 2`` (AIC) or ``log n`` (BIC)."""
    n = fit.n if n is None else n
    if criterion == "aic":
        c = 2.0
    elif criterion == "bic":
        c = math.log(n)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    m = np.arange(fit.sigma2.size)
    with np.errstate(divide="ignore"):
        return np.log(fit.sigma2) + c * m / n


def select_order(fit: ArFit, criterion: str = "bic", n: Optional[int] = None) -> int:
    """Minimizing order; ties resolve to the smallest."""
    return int(np.argmin(order_criteria(fit, criterion, n)))


def is_stable(ar: np.ndarray) -> bool:
    """All roots of ``1 - sum a_k z^k`` outside the unit circle."""
    ar = np.asarray(ar, dtype=float)
    if ar.size == 0:
        return True
    companion = np.zeros((ar.size, ar.size))
    companion[0] = ar
    companion[1:, :-1] = np.eye(ar.size - 1)
    return bool(np.max(np.abs(np.linalg.eigvals(companion))) < 1.0)


@dataclass(frozen=True)
class SpectralCurve:
    omega: np.ndarray
    density: np.ndarray
    order: Optional[int] = None
    flat: Optional[bool] = None


def frequency_grid(n: int = DEFAULT_GRID) -> np.ndarray:
    """``n`` equispaced frequencies on [0, 1/2]."""
    return np.linspace(0.0, 0.5, n)


def ar_density(ar: np.ndarray, sigma2: float, omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    ar = np.asarray(ar, dtype=float)
    k = np.arange(1, ar.size + 1)
    transfer = 1.0 - np.exp(2j * np.pi * np.outer(omega, k)) @ ar if ar.size else np.ones(omega.shape)
    return sigma2 / np.abs(transfer) ** 2


def ar_spectral_density(fit: ArFit, omega_grid=None) -> SpectralCurve:
    """``sigma2 / |1 - sum a_k exp(2 pi i omega k)|^2`` for the selected order."""
    omega = frequency_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    if not is_stable(fit.ar):
        raise UnstableModel("AR polynomial has a root inside the unit circle")
    return SpectralCurve(omega, ar_density(fit.ar, fit.innovation_variance, omega), fit.order)


@dataclass(frozen=True)
class LPSpectrum:
    """Per-component spectra; key ``"Z"`` is the normalized series, ``j`` is ``YS_j``."""

    curves: dict
    omega: np.ndarray

    @property
    def flat_components(self) -> list[int]:
        return [j for j, c in self.curves.items() if j != "Z" and c.flat]

    @property
    def orders(self) -> dict:
        return {j: c.order for j, c in self.curves.items()}


def lp_spectrum(series: LPSeries, max_order: int = 20, omega_grid=None,
                criterion: str = "bic") -> LPSpectrum:
    """Burg + BIC AR spectrum for Z and each ``YS_j``; order 0 means flat."""
    omega = frequency_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    columns = [("Z", series.z)] + [(j, series.column(j)) for j in range(1, series.k + 1)]
    curves = {}
    for key, col in columns:
        full = burg_fit(col, max_order)
        fit = full.with_order(select_order(full, criterion))
        curve = ar_spectral_density(fit, omega)
        curves[key] = SpectralCurve(omega, curve.density, fit.order, fit.order == 0)
    return LPSpectrum(curves, omega)


@dataclass(frozen=True)
class CopulaSpectrum:
    omega: np.ndarray
    density: np.ndarray
    imag: np.ndarray


def copula_spectral_density(models: Sequence[CopulaModel], u: float, v: float,
                            omega_grid=None) -> CopulaSpectrum:
    """``1 + sum_{0<|h|<=H} (cop(u,v;h) - 1) exp(-2 pi i h omega)``.

    ``models[h-1]`` is the lag-h copula; negative lags use
    ``cop(u, v; -h) = cop(v, u; h)``. The real part is the estimate; the
    imaginary part vanishes when ``u == v`` or the comoments are symmetric.
    """
    omega = frequency_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    total = np.ones(omega.shape, dtype=complex)
    for h, model in enumerate(models, start=1):
        fwd = model.density(u, v) - 1.0
        bwd = model.density(v, u) - 1.0
        phase = np.exp(-2j * np.pi * h * omega)
        total += fwd * phase + bwd * np.conj(phase)
    return CopulaSpectrum(omega, total.real, total.imag)
