"""Seeded simulators used by tests, scripts and the acceptance suite."""
from __future__ import annotations

import numpy as np
from scipy.signal import lfilter


def rng_for(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def ar_process(coefs, n: int, seed, burn: int = 500, scale: float = 1.0) -> np.ndarray:
    """``Y(t) = sum a_k Y(t-k) + e(t)`` with Gaussian innovations."""
    coefs = np.asarray(coefs, dtype=float)
    e = rng_for(seed).standard_normal(n + burn) * scale
    return lfilter([1.0], np.concatenate(([1.0], -coefs)), e)[burn:]


def var_process(coefs, n: int, seed, burn: int = 500) -> np.ndarray:
    """VAR with coefficient matrices ``coefs[i] = A_{i+1}`` and N(0, I) noise."""
    coefs = np.asarray(coefs, dtype=float)
    m, k, _ = coefs.shape
    e = rng_for(seed).standard_normal((n + burn, k))
    x = np.zeros((n + burn, k))
    for t in range(m, n + burn):
        x[t] = e[t] + sum(coefs[i] @ x[t - 1 - i] for i in range(m))
    return x[burn:]


def arch1(n: int, seed, omega: float = 0.2, alpha: float = 0.7, burn: int = 500) -> np.ndarray:
    """``Y = sigma_t eps_t`` with ``sigma_t^2 = omega + alpha Y_{t-1}^2``."""
    eps = rng_for(seed).standard_normal(n + burn)
    y = np.zeros(n + burn)
    for t in range(1, n + burn):
        y[t] = np.sqrt(omega + alpha * y[t - 1] ** 2) * eps[t]
    return y[burn:]


def iid_normal(n: int, seed) -> np.ndarray:
    return rng_for(seed).standard_normal(n)
