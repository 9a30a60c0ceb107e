"""Physical hyperspherical harmonics for one-electron and two-electron 1S terms.

For two electrons with L = 0, S = 0 the harmonics depend on the hyperangle
eta (r1 = r sin eta, r2 = r cos eta) and on x = cos(theta_12) only::

    Y_{K,l}(eta, x) = N_{K,l} (sin eta cos eta)^l P_m^{(l+1/2, l+1/2)}(cos 2 eta) P_l(x),
    m = (K - 2 l) / 2

and are orthonormal under the reduced measure cos^2(eta) sin^2(eta) d(eta) dx.
Only harmonics with even m are kept; they are symmetric under electron exchange
(eta -> pi/2 - eta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from hhladder.errors import BasisError, UnsupportedTermError
from hhladder.quadrature import HALF_PI, QUARTER_PI, QuadratureSpec, eta_rule
from hhladder.special import gauss_legendre, jacobi, legendre


@dataclass(frozen=True)
class TermLabel:
    """Atomic term [L, M, S, Sz, parity] of an Ne-electron ion with nuclear charge Z."""

    L: int
    M: int
    S: float
    Sz: float
    parity: int
    Ne: int
    Z: float

    def __post_init__(self):
        if self.L < 0 or abs(self.M) > self.L:
            raise UnsupportedTermError(f"need |M| <= L, L >= 0 (got L={self.L}, M={self.M})")
        if self.S < 0 or abs(self.Sz) > self.S:
            raise UnsupportedTermError(f"need |Sz| <= S (got S={self.S}, Sz={self.Sz})")
        if self.parity not in (1, -1):
            raise UnsupportedTermError(f"parity must be +1 or -1, got {self.parity}")
        if not (isinstance(self.Z, (int, float)) and math.isfinite(self.Z) and self.Z >= 0):
            raise UnsupportedTermError(f"nuclear charge must be finite and non-negative, got {self.Z!r}")
        if self.Ne == 1:
            if self.S != 0.5 or self.parity != (-1) ** self.L:
                raise UnsupportedTermError("one-electron terms need S = 1/2 and parity (-1)^L")
        elif self.Ne == 2:
            if (self.L, self.S, self.parity) != (0, 0, 1):
                raise UnsupportedTermError("only the 1S (L=0, S=0, even parity) two-electron term is supported")
        else:
            raise UnsupportedTermError(f"Ne={self.Ne} is not supported (Ne must be 1 or 2)")

    @classmethod
    def hydrogenic(cls, Z: float, ell: int) -> "TermLabel":
        return cls(L=ell, M=0, S=0.5, Sz=0.5, parity=(-1) ** ell, Ne=1, Z=Z)

    @classmethod
    def helium_like(cls, Z: float) -> "TermLabel":
        return cls(L=0, M=0, S=0, Sz=0, parity=1, Ne=2, Z=Z)

    def descriptor(self) -> dict:
        return {"L": self.L, "M": self.M, "S": self.S, "Sz": self.Sz, "parity": self.parity,
                "Ne": self.Ne, "Z": self.Z}


@dataclass(frozen=True, order=True)
class HHIndex:
    """Label (K, ell) of one physical harmonic; for Ne = 1, K = ell = L."""

    K: int
    ell: int

    @property
    def jacobi_degree(self) -> int:
        return (self.K - 2 * self.ell) // 2


def validate_index(term: TermLabel, index: HHIndex) -> None:
    K, ell = index.K, index.ell
    if term.Ne == 1:
        if K != term.L or ell != term.L:
            raise BasisError(f"one-electron basis admits only K = ell = {term.L}, got {index}")
        return
    if K < 0 or K % 2:
        raise BasisError(f"K must be even and non-negative, got {index}")
    if not 0 <= ell <= K // 2:
        raise BasisError(f"need 0 <= ell <= K/2, got {index}")
    if (K // 2 - ell) % 2:
        raise BasisError(f"{index} is antisymmetric under electron exchange (K/2 - ell odd)")


@dataclass(frozen=True)
class FullToKmax:
    Kmax: int
    name = "full_to_Kmax"

    def descriptor(self) -> dict:
        return {"policy": self.name, "Kmax": self.Kmax}


@dataclass(frozen=True)
class MainOnly:
    """The |4k, 0> family with 4k <= Kmax."""

    Kmax: int
    name = "main_only"

    def descriptor(self) -> dict:
        return {"policy": self.name, "Kmax": self.Kmax}


@dataclass(frozen=True)
class Explicit:
    indices: tuple[tuple[int, int], ...]
    name = "explicit"

    def __init__(self, indices: Sequence[Sequence[int]]):
        object.__setattr__(self, "indices", tuple((int(K), int(l)) for K, l in indices))

    @property
    def Kmax(self) -> int:
        return max((K for K, _ in self.indices), default=0)

    def descriptor(self) -> dict:
        return {"policy": self.name, "indices": [list(p) for p in self.indices]}


Policy = Union[FullToKmax, MainOnly, Explicit]


@dataclass(frozen=True)
class BasisSet:
    term: TermLabel
    indices: tuple[HHIndex, ...]
    policy: Policy = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if not self.indices:
            raise BasisError("basis is empty")
        if len(set(self.indices)) != len(self.indices):
            raise BasisError("basis contains duplicate indices")
        for idx in self.indices:
            validate_index(self.term, idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[HHIndex]:
        return iter(self.indices)

    @property
    def K(self) -> NDArray[np.int64]:
        return np.array([i.K for i in self.indices], dtype=np.int64)

    @property
    def ell(self) -> NDArray[np.int64]:
        return np.array([i.ell for i in self.indices], dtype=np.int64)

    @property
    def Kmax(self) -> int:
        return int(self.K.max())


def _check_kmax(Kmax) -> None:
    if not isinstance(Kmax, (int, np.integer)) or isinstance(Kmax, bool) or Kmax < 0 or Kmax % 2:
        raise BasisError(f"Kmax must be an even non-negative integer, got {Kmax!r}")


def enumerate_basis(term: TermLabel, policy: Policy) -> BasisSet:
    """Deterministic basis for ``term`` under ``policy``, sorted by (K, ell)."""
    if isinstance(policy, (FullToKmax, MainOnly)):
        _check_kmax(policy.Kmax)
    elif not isinstance(policy, Explicit):
        raise BasisError(f"unknown selection policy {policy!r}")

    if term.Ne == 1:
        if isinstance(policy, Explicit):
            indices = [HHIndex(K, l) for K, l in policy.indices]
        else:
            indices = [HHIndex(term.L, term.L)]
        return BasisSet(term, tuple(indices), policy)

    if isinstance(policy, FullToKmax):
        indices = [HHIndex(K, l) for K in range(0, policy.Kmax + 1, 2)
                   for l in range(K // 2 + 1) if (K // 2 - l) % 2 == 0]
    elif isinstance(policy, MainOnly):
        indices = [HHIndex(K, 0) for K in range(0, policy.Kmax + 1, 4)]
    else:
        indices = sorted(HHIndex(K, l) for K, l in policy.indices)
    return BasisSet(term, tuple(indices), policy)


def reduced_measure(eta: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
    """Weight cos^2(eta) sin^2(eta) (flat in x); Euler-angle constants are dropped."""
    eta = np.asarray(eta, dtype=float)
    x = np.asarray(x, dtype=float)
    s, c = np.sin(eta), np.cos(eta)
    return np.broadcast_to(c * c * s * s, np.broadcast_shapes(eta.shape, x.shape)).copy()


def _raw_eta_factor(K: int, ell: int, eta: NDArray[np.float64]) -> NDArray[np.float64]:
    m = (K - 2 * ell) // 2
    a = ell + 0.5
    return (np.sin(eta) * np.cos(eta)) ** ell * jacobi(m, a, a, np.cos(2.0 * eta))


@lru_cache(maxsize=None)
def normalization(K: int, ell: int) -> float:
    """N_{K,l} making Y_{K,l} unit-norm under the reduced measure (by quadrature)."""
    n = max(64, K + 32)
    e1, w1 = gauss_legendre(n, 0.0, QUARTER_PI)
    e2, w2 = gauss_legendre(n, QUARTER_PI, HALF_PI)
    eta = np.concatenate([e1, e2])
    w = np.concatenate([w1, w2]) * reduced_measure(eta, 0.0)
    eta_norm = float(np.sum(w * _raw_eta_factor(K, ell, eta) ** 2))
    x, wx = gauss_legendre(ell + 1)
    x_norm = float(np.sum(wx * legendre(ell, x) ** 2))
    return 1.0 / math.sqrt(eta_norm * x_norm)


def eta_factor(index: HHIndex, eta: ArrayLike) -> NDArray[np.float64]:
    """Normalised hyperangular factor: Y(eta, x) = eta_factor(eta) * P_l(x)."""
    eta = np.asarray(eta, dtype=float)
    return normalization(index.K, index.ell) * _raw_eta_factor(index.K, index.ell, eta)


def hh_evaluate(index: HHIndex, eta: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
    eta = np.asarray(eta, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any((eta < 0) | (eta > HALF_PI)) or np.any(np.abs(x) > 1):
        raise ValueError("need eta in [0, pi/2] and x in [-1, 1]")
    return eta_factor(index, eta) * legendre(index.ell, x)


def _require_two_electron(basis: BasisSet) -> None:
    if basis.term.Ne != 2:
        raise UnsupportedTermError("hyperangular harmonics are only defined for Ne = 2 here")


def gram_matrix(basis: BasisSet, quad: QuadratureSpec | None = None) -> NDArray[np.float64]:
    """Overlap matrix <Y_i|Y_j> by tensor Gauss-Legendre quadrature in (eta, x)."""
    _require_two_electron(basis)
    quad = quad or QuadratureSpec()
    eta, w_eta = eta_rule(quad)
    w_eta = w_eta * reduced_measure(eta, 0.0)
    lmax = int(basis.ell.max())
    x, w_x = gauss_legendre(lmax + 1)

    U = np.array([eta_factor(idx, eta) for idx in basis])
    P = np.array([legendre(idx.ell, x) for idx in basis])
    G_eta = (U[:, None, :] * U[None, :, :] * w_eta).sum(axis=-1)
    G_x = (P[:, None, :] * P[None, :, :] * w_x).sum(axis=-1)
    G = G_eta * G_x
    return 0.5 * (G + G.T)


@dataclass(frozen=True)
class FiniteDifferenceGrid:
    """Evaluation points in [lo, hi] with central-difference step ``step``."""

    step: float = 1e-3
    lo: float = 0.05
    hi: float = HALF_PI - 0.05
    points: int = 400

    def nodes(self) -> NDArray[np.float64]:
        if self.lo - self.step <= 0.0 or self.hi + self.step >= HALF_PI or self.lo >= self.hi:
            raise ValueError("finite-difference grid must stay inside (0, pi/2)")
        return np.linspace(self.lo, self.hi, self.points)


def apply_lambda2(index: HHIndex, eta: NDArray[np.float64], h: float, Ne: int = 2) -> NDArray[np.float64]:
    """Grand-angular operator on the eta factor, derivatives by central differences."""
    f = lambda e: eta_factor(index, e)  # noqa: E731
    f0, fp, fm = f(eta), f(eta + h), f(eta - h)
    d1 = (fp - fm) / (2.0 * h)
    d2 = (fp - 2.0 * f0 + fm) / (h * h)
    s, c = np.sin(eta), np.cos(eta)
    ll = index.ell * (index.ell + 1)
    drift = ((3 * Ne - 4) * c * c - 2.0 * s * s) / (s * c)
    return -d2 - drift * d1 + ll / (s * s) * f0 + ll / (c * c) * f0


def lambda2_check(index: HHIndex, grid: FiniteDifferenceGrid | None = None, Ne: int = 2) -> float:
    """Relative residual of Lambda^2 Y = K(K + 3Ne - 2) Y on the grid.

    The residual is taken against the sup norm of K(K+3Ne-2) Y over the grid,
    since pointwise ratios are undefined at the nodes of Y. For K = 0 the
    eigenvalue vanishes and the absolute residual is returned.
    """
    if Ne != 2:
        raise UnsupportedTermError("hyperangular harmonics are only defined for Ne = 2 here")
    grid = grid or FiniteDifferenceGrid()
    eta = grid.nodes()
    eig = index.K * (index.K + 3 * Ne - 2)
    target = eig * eta_factor(index, eta)
    resid = apply_lambda2(index, eta, grid.step, Ne) - target
    scale = np.max(np.abs(target)) if eig else 1.0
    return float(np.max(np.abs(resid)) / scale)
