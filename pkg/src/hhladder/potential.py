"""Hyperangular Coulomb potential matrix W in the harmonic basis.

For Ne = 2 the potential is W(eta, x) / r with

    W = -Z / sin(eta) - Z / cos(eta) + 1 / sqrt(1 - sin(2 eta) x).

The repulsion is expanded in Legendre multipoles, so the x-integral reduces to
exact integrals of three Legendre polynomials and only 1-D eta integrals remain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
from numpy.typing import NDArray

from hhladder.errors import BasisError, HHLadderError, QuadratureError
from hhladder.hyperbasis import BasisSet, eta_factor, reduced_measure
from hhladder.quadrature import QuadratureSpec, eta_rule

log = logging.getLogger(__name__)

CONVERGENCE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PotentialMatrix:
    basis: BasisSet
    W: NDArray[np.float64]

    def __post_init__(self):
        n = len(self.basis)
        if self.W.shape != (n, n):
            raise BasisError(f"W has shape {self.W.shape}, basis has {n} functions")
        if not np.array_equal(self.W, self.W.T):
            raise ValueError("W must be exactly symmetric")
        self.W.setflags(write=False)

    @property
    def Ne(self) -> int:
        return self.basis.term.Ne


@lru_cache(maxsize=None)
def legendre_triple(l1: int, q: int, l2: int) -> float:
    """Exact integral of P_l1 P_q P_l2 over [-1, 1] (twice the squared 3j symbol)."""
    if min(l1, q, l2) < 0:
        raise ValueError("degrees must be non-negative")
    two_s = l1 + q + l2
    if two_s % 2 or q < abs(l1 - l2) or q > l1 + l2:
        return 0.0
    s = two_s // 2
    threej_sq = Fraction(
        factorial(two_s - 2 * l1) * factorial(two_s - 2 * q) * factorial(two_s - 2 * l2),
        factorial(two_s + 1),
    ) * Fraction(factorial(s), factorial(s - l1) * factorial(s - q) * factorial(s - l2)) ** 2
    return float(2 * threej_sq)


def default_qmax(basis: BasisSet) -> int:
    return 2 * int(basis.ell.max())


def _triple_table(ells: NDArray[np.int64], q: int) -> NDArray[np.float64]:
    return np.array([[legendre_triple(int(a), q, int(b)) for b in ells] for a in ells])


def _two_electron_W(basis: BasisSet, quad: QuadratureSpec) -> NDArray[np.float64]:
    Z = float(basis.term.Z)
    eta, w = eta_rule(quad)
    w = w * reduced_measure(eta, 0.0)
    s, c = np.sin(eta), np.cos(eta)
    r_less, r_greater = np.minimum(s, c), np.maximum(s, c)

    U = np.array([eta_factor(idx, eta) for idx in basis])
    pair = U[:, None, :] * U[None, :, :]
    ells = basis.ell

    nuclear = (pair * (w * (-Z / s - Z / c))).sum(axis=-1)
    W = _triple_table(ells, 0) * nuclear

    qmax = quad.qmax_override if quad.qmax_override is not None else default_qmax(basis)
    for q in range(qmax + 1):
        T = _triple_table(ells, q)
        if not T.any():
            continue
        radial = (pair * (w * r_less**q / r_greater ** (q + 1))).sum(axis=-1)
        W = W + T * radial
    return W


def _symmetrize(W: NDArray[np.float64]) -> NDArray[np.float64]:
    upper = np.triu(W)
    return upper + np.triu(W, 1).T


def assemble_W(basis: BasisSet, quad: QuadratureSpec | None = None,
               check_convergence: bool = True) -> PotentialMatrix:
    """Matrix <Y_i| W |Y_j> of the hyperangular Coulomb potential.

    With ``check_convergence`` the eta integrals are repeated at twice the node
    count and a ``QuadratureError`` is raised if any entry moves by more than
    1e-10.
    """
    quad = quad or QuadratureSpec()
    term = basis.term
    if term.Ne == 1:
        return PotentialMatrix(basis, -float(term.Z) * np.eye(len(basis)))

    W = _symmetrize(_two_electron_W(basis, quad))
    if check_convergence:
        W_fine = _symmetrize(_two_electron_W(basis, quad.refined()))
        drift = float(np.max(np.abs(W - W_fine)))
        log.debug("W quadrature drift %.3e at eta_nodes=%d", drift, quad.eta_nodes)
        if drift > CONVERGENCE_TOL:
            raise QuadratureError(
                f"eta quadrature not converged: doubling eta_nodes={quad.eta_nodes} moves W by {drift:.3e}"
            )
    if term.Z >= 2 and np.any(np.diag(W) >= 0):
        raise HHLadderError("diagonal of W is not attractive for Z >= 2; assembly is inconsistent")
    return PotentialMatrix(basis, W)
