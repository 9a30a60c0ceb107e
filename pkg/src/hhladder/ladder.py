"""Factorization chain of the hyperradial Hamiltonian in the K-representation.

Rung n (n >= 1) carries a diagonal beta_n = K + (3Ne - 1)/2 + (n - 1), a
symmetric alpha_n solving alpha_n beta_n + beta_n alpha_n = 2 W, and
a_n = -alpha_n^2 / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from hhladder.hyperbasis import BasisSet
from hhladder.potential import PotentialMatrix


def _rung(n: int) -> None:
    if n < 1:
        raise ValueError(f"ladder rungs start at n = 1, got {n}")


def build_beta(n: int, basis: BasisSet, Ne: int | None = None) -> NDArray[np.float64]:
    _rung(n)
    Ne = basis.term.Ne if Ne is None else Ne
    return np.diag(basis.K + (3 * Ne - 1) / 2 + (n - 1))


def build_alpha(n: int, W: PotentialMatrix, Ne: int | None = None) -> NDArray[np.float64]:
    """[alpha_n]_ij = 2 W_ij / (K_i + K_j + 3Ne - 1 + 2(n - 1))."""
    _rung(n)
    Ne = W.Ne if Ne is None else Ne
    K = W.basis.K
    den = K[:, None] + K[None, :] + (3 * Ne - 1) + 2 * (n - 1)
    return 2.0 * W.W / den


def build_a(alpha: NDArray[np.float64]) -> NDArray[np.float64]:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
        raise ValueError(f"alpha must be square, got shape {alpha.shape}")
    a = -0.5 * (alpha @ alpha)
    return 0.5 * (a + a.T)


@dataclass(frozen=True, eq=False)
class LadderMatrices:
    n: int
    beta: NDArray[np.float64]
    alpha: NDArray[np.float64]
    a: NDArray[np.float64]
    basis: BasisSet
    Ne: int


def build_ladder(n: int, W: PotentialMatrix) -> LadderMatrices:
    alpha = build_alpha(n, W)
    return LadderMatrices(n, build_beta(n, W.basis), alpha, build_a(alpha), W.basis, W.Ne)


def verify_factorization_identities(n: int, ladder: LadderMatrices, W: PotentialMatrix) -> tuple[float, float]:
    """Max-norm residuals of {alpha_n, beta_n} = 2W and of the beta recursion to n+1."""
    if ladder.basis.indices != W.basis.indices:
        raise ValueError("ladder and potential were built on different bases")
    anti = ladder.alpha @ ladder.beta + ladder.beta @ ladder.alpha - 2.0 * W.W
    nxt = build_beta(n + 1, ladder.basis, ladder.Ne)
    eye = np.eye(len(ladder.basis))
    rec = nxt @ (nxt - eye) - ladder.beta @ (ladder.beta + eye)
    return float(np.max(np.abs(anti))), float(np.max(np.abs(rec)))


@dataclass(frozen=True)
class ScalarLadder:
    beta: float
    alpha: float
    a: float
    E: float


def scalar_ladder_oracle(Q: float, ell: int, n: int) -> ScalarLadder:
    """Closed-form one-electron chain at radial quantum number n (0-based)."""
    if Q <= 0 or ell < 0 or n < 0:
        raise ValueError("need Q > 0, ell >= 0, n >= 0")
    beta = n + ell + 1
    alpha = Q / beta
    a = -0.5 * alpha * alpha
    return ScalarLadder(float(beta), alpha, a, a)
