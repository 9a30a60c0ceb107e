"""Orthogonal polynomials, Gauss-Legendre rules and log-Gamma helpers."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray


def jacobi(n: int, alpha: float, beta: float, x: ArrayLike) -> NDArray[np.float64]:
    """Jacobi polynomial P_n^(alpha, beta)(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        raise ValueError("degree must be non-negative")
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    ab = alpha + beta
    p = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        c = 2 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta)
        a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p_prev, p = p, (a2 * p - a3 * p_prev) / a1
    return p


def legendre(n: int, x: ArrayLike) -> NDArray[np.float64]:
    """Legendre polynomial P_n(x) by Bonnet's recurrence."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        raise ValueError("degree must be non-negative")
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p = x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p


@lru_cache(maxsize=None)
def _leggauss(n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    if n < 1:
        raise ValueError("need at least one node")
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def log_gamma(x: float) -> float:
    return math.lgamma(x)


def log_gamma_ratio(num: float, den1: float, den2: float) -> float:
    """log of Gamma(num) / sqrt(Gamma(den1) * Gamma(den2))."""
    return math.lgamma(num) - 0.5 * math.lgamma(den1) - 0.5 * math.lgamma(den2)
