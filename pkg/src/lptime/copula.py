"""Serial copula density from LP-comoments and the measures derived from it.

A :class:`CopulaModel` pairs a coefficient matrix with a row basis (the
earlier variable) and a column basis (the later one). With empirical score
bases every integral is a finite sum over quantile cells and therefore exact;
with :class:`~lptime.basis.LegendreBasis` the Gauss rule is exact for the
polynomial integrands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy import special, stats

from .basis import LegendreBasis, LPSeries, ScoreBasis
from .comoment import ComomentMatrix, comoment
from .empirical import check_probability
from .errors import DegenerateCopula

LOG_FLOOR = 1e-12
_CHUNK = 1 << 22  # grid cells evaluated per block

Basis = Union[ScoreBasis, LegendreBasis]


@dataclass(frozen=True)
class CopulaModel:
    """``cop(u, v) = 1 + sum_jm coef[j, m] S_j(u) S_m(v)``."""

    coef: np.ndarray
    row_basis: Basis
    col_basis: Basis
    lag: Union[int, str, None] = None

    def __post_init__(self):
        coef = np.atleast_2d(np.asarray(self.coef, dtype=float))
        if coef.shape != (self.row_basis.k, self.col_basis.k):
            raise ValueError(
                f"coefficient shape {coef.shape} does not match bases "
                f"({self.row_basis.k}, {self.col_basis.k})"
            )
        object.__setattr__(self, "coef", coef)

    @classmethod
    def from_comoment(cls, matrix: ComomentMatrix, basis: Basis, use_smooth: bool = True,
                      col_basis: Basis | None = None) -> "CopulaModel":
        return cls(matrix.values(use_smooth), basis, col_basis or basis, matrix.lag)

    @classmethod
    def legendre(cls, coef) -> "CopulaModel":
        """Continuous-case model on Legendre scores."""
        coef = np.atleast_2d(np.asarray(coef, dtype=float))
        k = max(coef.shape)
        full = np.zeros((k, k))
        full[: coef.shape[0], : coef.shape[1]] = coef
        basis = LegendreBasis(k)
        return cls(full, basis, basis)

    # -- pointwise -------------------------------------------------------

    def _pairs(self, u, v):
        u_arr, v_arr = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        return u_arr.ravel(), v_arr.ravel(), u_arr.shape

    def density(self, u, v):
        """Raw orthogonal-series density at the pairs ``(u, v)``; may be negative."""
        uu, vv, shape = self._pairs(u, v)
        su = self.row_basis.scores_at(check_probability(uu))
        sv = self.col_basis.scores_at(check_probability(vv))
        out = (1.0 + np.einsum("jn,jm,mn->n", su, self.coef, sv)).reshape(shape)
        return float(out) if out.ndim == 0 else out

    def density_grid(self, u, v) -> np.ndarray:
        """``cop(u_i, v_l)`` for every pair; shape ``(len(u), len(v))``."""
        su = self.row_basis.scores_at(check_probability(np.atleast_1d(u)))
        sv = self.col_basis.scores_at(check_probability(np.atleast_1d(v)))
        return 1.0 + su.T @ self.coef @ sv

    def cdf(self, u, v):
        """``Cop(u, v) = u v + sum coef[j, m] I_j(u) I_m(v)`` with ``I_j = int_0 S_j``."""
        uu, vv, shape = self._pairs(u, v)
        iu = self.row_basis.antiderivative(uu)
        iv = self.col_basis.antiderivative(vv)
        out = (uu * vv + np.einsum("jn,jm,mn->n", iu, self.coef, iv)).reshape(shape)
        return float(out) if out.ndim == 0 else out

    # -- integrals over the unit square ------------------------------------

    def _reduce(self, fn) -> float:
        """Sum ``w_i w_l fn(cop_il)`` over the product quadrature grid."""
        _, wr, sr = self.row_basis.quadrature()
        _, wc, sc = self.col_basis.quadrature()
        right = self.coef @ sc
        step = max(1, _CHUNK // max(1, wc.size))
        total = 0.0
        for start in range(0, wr.size, step):
            block = 1.0 + sr[:, start:start + step].T @ right
            total += float(wr[start:start + step] @ fn(block) @ wc)
        return total

    @cached_property
    def clip_constant(self) -> float:
        """``Z = int int max(cop, 0)``; at least 1 since clipping only adds mass."""
        return self._reduce(lambda c: np.maximum(c, 0.0))

    def integral_of_square(self) -> float:
        return self._reduce(np.square)

    def slice_coefficients(self, u) -> np.ndarray:
        """``beta_m(u) = sum_j S_j(u) coef[j, m]`` for ``m = 1..k``."""
        su = self.row_basis.scores_at(check_probability(np.atleast_1d(u)))
        return su.T @ self.coef


def serial_copula(series: LPSeries, h: int, use_smooth: bool = True) -> CopulaModel:
    mat = comoment(series, h, smooth=True)
    return CopulaModel.from_comoment(mat, series.basis, use_smooth)


def copula_density(model: CopulaModel, u, v):
    return model.density(u, v)


def clipped_density(model: CopulaModel, u, v):
    """``max(cop, 0) / Z`` and the renormalization constant ``Z``."""
    z = model.clip_constant
    if not z > 0:
        raise DegenerateCopula("clipped copula density has no mass")
    val = np.maximum(model.density(u, v), 0.0) / z
    return val, z


def auto_lpinfor(model: CopulaModel) -> float:
    """Squared Frobenius norm of the (smoothed) coefficient matrix."""
    return float(np.sum(model.coef**2))


def granger_lin(model: CopulaModel) -> float:
    """``int int c log c`` of the clipped, renormalized density."""
    z = model.clip_constant
    if not z > 0:
        raise DegenerateCopula("clipped copula density has no mass")

    def integrand(block):
        c = np.maximum(block, 0.0) / z
        return c * np.log(np.maximum(c, LOG_FLOOR))

    return model._reduce(integrand)


def copula_cdf(model: CopulaModel, u, v):
    check_probability(u)
    check_probability(v)
    return model.cdf(u, v)


def quantile_correlation(model: CopulaModel, u):
    """Tail-dependence profile built from ``Cop(u, u)``."""
    u_arr = check_probability(np.atleast_1d(u))
    c = model.cdf(u_arr, u_arr)
    out = np.where(u_arr <= 0.5, c / u_arr, (1.0 - 2.0 * u_arr + c) / (1.0 - u_arr))
    return float(out[0]) if np.ndim(u) == 0 else out


def bivariate_normal_diagonal(h, rho: float):
    """``Phi_2(h, h; rho)`` via Owen's T function."""
    h = np.asarray(h, dtype=float)
    if rho >= 1.0:
        return stats.norm.cdf(h)
    if rho <= -1.0:
        return np.maximum(2.0 * stats.norm.cdf(h) - 1.0, 0.0)
    a = math.sqrt((1.0 - rho) / (1.0 + rho))
    return stats.norm.cdf(h) - 2.0 * special.owens_t(h, a)


def gaussian_copula_curve(rho: float, u):
    """Quantile correlation of the Gaussian copula with correlation ``rho``."""
    if abs(rho) > 1:
        raise ValueError("correlation must lie in [-1, 1]")
    u_arr = check_probability(np.atleast_1d(u))
    c = bivariate_normal_diagonal(stats.norm.ppf(u_arr), rho)
    out = np.where(u_arr <= 0.5, c / u_arr, (1.0 - 2.0 * u_arr + c) / (1.0 - u_arr))
    return float(out[0]) if np.ndim(u) == 0 else out


def blomqvist_beta(model: CopulaModel) -> float:
    """Medial correlation ``4 Cop(1/2, 1/2) - 1`` by term-wise integration."""
    iu = model.row_basis.antiderivative(0.5)[:, 0]
    iv = model.col_basis.antiderivative(0.5)[:, 0]
    return float(4.0 * iu @ model.coef @ iv)


def conditional_beta(model: CopulaModel, u, m: int):
    if not 1 <= m <= model.col_basis.k:
        raise ValueError(f"component {m} outside 1..{model.col_basis.k}")
    out = model.slice_coefficients(u)[:, m - 1]
    return float(out[0]) if np.ndim(u) == 0 else out


def conditional_lpinfor(model: CopulaModel, u):
    """``int_0^1 d(v; u)^2 dv - 1 = sum_m beta_m(u)^2``."""
    out = np.sum(model.slice_coefficients(u) ** 2, axis=1)
    return float(out[0]) if np.ndim(u) == 0 else out


def conditional_comparison_density(model: CopulaModel, u, v):
    """Density of the later variable given the earlier at quantile ``u``,
    relative to its marginal; a slice of the copula density."""
    return model.density(u, v)
